//! Per-level analysis pipeline and its JSON and SVG exports.
//!
//! The documents here are exactly what the service returns: the state graph
//! as node-link JSON with positions, the sequence graph with positions and an
//! optional distance matrix, and the sequence records used to answer queries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::{build_distance_matrix, DistanceConfig, DistanceError, DistanceMatrix};
use crate::game::{ItemId, Level, MoveAction, MoveError, PlayTrace};
use crate::ingest::{dedup_sequences, sequence_key, UniqueSequence};
use crate::layout::{
    force_directed_layout, matrix_force_layout, stress_mds_layout, Algorithm, LayoutConfig, LayoutError,
    LayoutResult, Pins, Point, RadiusScale,
};
use crate::stategraph::{build_state_graph, NodeClass, SequencePath, StateGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub distance: DistanceConfig,
    pub state_layout: LayoutConfig,
    pub sequence_layout: LayoutConfig,
    pub radius: RadiusScale,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            distance: DistanceConfig::default(),
            state_layout: LayoutConfig::default(),
            sequence_layout: LayoutConfig::stress_mds(),
            radius: RadiusScale::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("level {0} has no accepted traces")]
    NoTraces(String),
    #[error("trace {trace_id} belongs to level {found}, not {expected}")]
    WrongLevel { trace_id: String, expected: String, found: String },
    #[error("distance: {0}")]
    Distance(#[from] DistanceError),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("sequence {sequence_id} does not replay: {source}")]
    Replay { sequence_id: usize, source: MoveError },
}

/// Everything computed for one level.
#[derive(Debug, Clone)]
pub struct LevelAnalysis {
    pub level: Level,
    pub trace_count: usize,
    pub sequences: Vec<UniqueSequence>,
    pub graph: StateGraph,
    pub paths: BTreeMap<usize, SequencePath>,
    pub matrix: DistanceMatrix,
    pub big: u64,
    pub state_layout: LayoutResult,
    pub sequence_layout: LayoutResult,
}

pub fn layout_state_graph(graph: &StateGraph, cfg: &LayoutConfig, pins: &Pins) -> Result<LayoutResult, LayoutError> {
    force_directed_layout(graph.nodes.len(), &graph.layout_edges(), cfg, pins)
}

pub fn layout_sequence_graph(
    matrix: &DistanceMatrix,
    cfg: &LayoutConfig,
    pins: &Pins,
) -> Result<LayoutResult, LayoutError> {
    match cfg.algorithm {
        Algorithm::StressMds => stress_mds_layout(matrix, cfg, pins),
        Algorithm::ForceDirected => matrix_force_layout(matrix, cfg, pins),
    }
}

/// Dedup, state graph, distance matrix and both layouts for one level.
pub fn analyze_level(level: &Level, traces: &[PlayTrace], cfg: &AnalysisConfig) -> Result<LevelAnalysis, AnalysisError> {
    if let Some(t) = traces.iter().find(|t| t.level_id != level.id()) {
        return Err(AnalysisError::WrongLevel {
            trace_id: t.trace_id.clone(),
            expected: level.id().to_string(),
            found: t.level_id.clone(),
        });
    }
    if traces.is_empty() {
        return Err(AnalysisError::NoTraces(level.id().to_string()));
    }
    let sequences = dedup_sequences(traces);
    let (graph, paths) = build_state_graph(level, &sequences);
    let (matrix, big) = build_distance_matrix(&sequences, level, &cfg.distance)?;
    let state_layout = layout_state_graph(&graph, &cfg.state_layout, &Pins::new())?;
    let sequence_layout = layout_sequence_graph(&matrix, &cfg.sequence_layout, &Pins::new())?;
    Ok(LevelAnalysis {
        level: level.clone(),
        trace_count: traces.len(),
        sequences,
        graph,
        paths,
        matrix,
        big,
        state_layout,
        sequence_layout,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub marker: u32,
    pub collected: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateNodeDoc {
    pub id: usize,
    pub class: NodeClass,
    pub visits: u64,
    pub starts: u64,
    pub terminations: u64,
    pub state: StateDoc,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub action: MoveAction,
    pub traversals: u64,
}

/// Node-link export of the state graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateGraphDoc {
    pub level_id: String,
    pub nodes: Vec<StateNodeDoc>,
    pub edges: Vec<EdgeDoc>,
    /// Sequence id -> node ids along its route.
    pub paths: BTreeMap<usize, Vec<usize>>,
    /// Sequence id -> edge ids along its route.
    pub path_edges: BTreeMap<usize, Vec<usize>>,
    pub max_visits: u64,
    pub max_traversals: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceNodeDoc {
    pub sequence_id: usize,
    pub popularity: usize,
    pub completed: bool,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceGraphDoc {
    pub level_id: String,
    pub algorithm: Algorithm,
    pub nodes: Vec<SequenceNodeDoc>,
    /// The value standing for "no feasible alignment" in the matrix.
    pub big: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_stress: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<DistanceMatrix>,
}

impl SequenceGraphDoc {
    pub fn without_matrix(&self) -> SequenceGraphDoc {
        SequenceGraphDoc { matrix: None, ..self.clone() }
    }
}

/// Persisted form of a unique sequence; states are rebuilt by replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub sequence_id: usize,
    pub moves: Vec<MoveAction>,
    pub popularity: usize,
    pub completed: bool,
    pub member_player_ids: Vec<String>,
    pub member_trace_ids: Vec<String>,
}

impl SequenceRecord {
    pub fn from_sequence(seq: &UniqueSequence) -> SequenceRecord {
        SequenceRecord {
            sequence_id: seq.sequence_id,
            moves: seq.moves.clone(),
            popularity: seq.popularity,
            completed: seq.completed,
            member_player_ids: seq.member_player_ids.clone(),
            member_trace_ids: seq.member_trace_ids.clone(),
        }
    }

    pub fn to_sequence(&self, level: &Level) -> Result<UniqueSequence, AnalysisError> {
        let states = level
            .replay(&self.moves)
            .map_err(|source| AnalysisError::Replay { sequence_id: self.sequence_id, source })?;
        Ok(UniqueSequence {
            sequence_id: self.sequence_id,
            key: sequence_key(&self.moves),
            level_id: level.id().to_string(),
            moves: self.moves.clone(),
            states,
            popularity: self.popularity,
            member_player_ids: self.member_player_ids.clone(),
            member_trace_ids: self.member_trace_ids.clone(),
            completed: self.completed,
        })
    }
}

pub fn state_graph_doc(
    level: &Level,
    graph: &StateGraph,
    paths: &BTreeMap<usize, SequencePath>,
    layout: &LayoutResult,
    radius: &RadiusScale,
) -> StateGraphDoc {
    let max_visits = graph.max_visits();
    let nodes = graph
        .nodes
        .iter()
        .map(|n| {
            let [x, y] = layout.positions[n.node_id];
            StateNodeDoc {
                id: n.node_id,
                class: n.class,
                visits: n.visits,
                starts: n.starts,
                terminations: n.terminations,
                state: StateDoc { marker: n.state.marker, collected: level.collected_ids(&n.state) },
                x,
                y,
                radius: radius.radius(n.visits, max_visits),
            }
        })
        .collect();
    let edges = graph
        .edges
        .iter()
        .map(|e| EdgeDoc { id: e.edge_id, from: e.from, to: e.to, action: e.action, traversals: e.traversals })
        .collect();
    StateGraphDoc {
        level_id: graph.level_id.clone(),
        nodes,
        edges,
        paths: paths.iter().map(|(&id, p)| (id, p.node_ids.clone())).collect(),
        path_edges: paths.iter().map(|(&id, p)| (id, p.edge_ids.clone())).collect(),
        max_visits,
        max_traversals: graph.max_traversals(),
    }
}

pub fn sequence_graph_doc(
    level_id: &str,
    sequences: &[UniqueSequence],
    matrix: &DistanceMatrix,
    big: u64,
    layout: &LayoutResult,
    cfg: &AnalysisConfig,
) -> SequenceGraphDoc {
    let max_pop = sequences.iter().map(|s| s.popularity).max().unwrap_or(0) as u64;
    let nodes = matrix
        .order
        .iter()
        .zip(&layout.positions)
        .map(|(&id, &[x, y])| {
            let s = &sequences[id];
            SequenceNodeDoc {
                sequence_id: id,
                popularity: s.popularity,
                completed: s.completed,
                x,
                y,
                radius: cfg.radius.radius(s.popularity as u64, max_pop),
            }
        })
        .collect();
    SequenceGraphDoc {
        level_id: level_id.to_string(),
        algorithm: cfg.sequence_layout.algorithm,
        nodes,
        big,
        final_stress: layout.final_stress,
        matrix: Some(matrix.clone()),
    }
}

impl LevelAnalysis {
    pub fn state_graph_doc(&self, cfg: &AnalysisConfig) -> StateGraphDoc {
        state_graph_doc(&self.level, &self.graph, &self.paths, &self.state_layout, &cfg.radius)
    }

    pub fn sequence_graph_doc(&self, cfg: &AnalysisConfig) -> SequenceGraphDoc {
        sequence_graph_doc(self.level.id(), &self.sequences, &self.matrix, self.big, &self.sequence_layout, cfg)
    }

    pub fn sequence_records(&self) -> Vec<SequenceRecord> {
        self.sequences.iter().map(SequenceRecord::from_sequence).collect()
    }
}

/// Replaces node positions in a state-graph document.
pub fn apply_positions_state(doc: &mut StateGraphDoc, positions: &[Point]) {
    for node in &mut doc.nodes {
        [node.x, node.y] = positions[node.id];
    }
}

/// Replaces node positions in a sequence-graph document, in node order.
pub fn apply_positions_sequence(doc: &mut SequenceGraphDoc, positions: &[Point]) {
    for (node, &[x, y]) in doc.nodes.iter_mut().zip(positions) {
        node.x = x;
        node.y = y;
    }
}

const MARGIN: f64 = 40.0;

fn class_color(class: NodeClass) -> &'static str {
    match class {
        NodeClass::Start => "#3b6fd4",
        NodeClass::End => "#d43b3b",
        NodeClass::Mid => "#e8c93a",
    }
}

struct Frame {
    min: Point,
    scale: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Point>, size: f64) -> Frame {
        let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for a in 0..2 {
                min[a] = min[a].min(p[a]);
                max[a] = max[a].max(p[a]);
            }
        }
        if !min[0].is_finite() {
            return Frame { min: [0.0, 0.0], scale: 1.0 };
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]);
        let scale = if span > 0.0 { (size - 2.0 * MARGIN) / span } else { 1.0 };
        Frame { min, scale }
    }

    fn map(&self, p: Point) -> Point {
        [MARGIN + (p[0] - self.min[0]) * self.scale, MARGIN + (p[1] - self.min[1]) * self.scale]
    }
}

/// Static snapshot of the state view: nodes colored by class, edge width from traversals.
pub fn state_graph_svg(doc: &StateGraphDoc, size: f64) -> String {
    let frame = Frame::fit(doc.nodes.iter().map(|n| [n.x, n.y]), size);
    let mut out = svg_open(size, &format!("state graph {}", doc.level_id));
    out.push_str("  <g stroke=\"#777\" stroke-opacity=\"0.6\">\n");
    for e in &doc.edges {
        let a = frame.map([doc.nodes[e.from].x, doc.nodes[e.from].y]);
        let b = frame.map([doc.nodes[e.to].x, doc.nodes[e.to].y]);
        let width = 1.0 + 7.0 * e.traversals as f64 / doc.max_traversals.max(1) as f64;
        let _ = writeln!(
            out,
            "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke-width=\"{width:.2}\"><title>{}</title></line>",
            a[0], a[1], b[0], b[1], e.action
        );
    }
    out.push_str("  </g>\n  <g stroke=\"#222\" stroke-width=\"0.5\">\n");
    for n in &doc.nodes {
        let p = frame.map([n.x, n.y]);
        let _ = writeln!(
            out,
            "    <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"{}\"><title>node {} visits {}</title></circle>",
            p[0],
            p[1],
            n.radius,
            class_color(n.class),
            n.id,
            n.visits
        );
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

/// Static snapshot of the sequence view: green complete, pink incomplete, labeled by rank.
pub fn sequence_graph_svg(doc: &SequenceGraphDoc, size: f64) -> String {
    let frame = Frame::fit(doc.nodes.iter().map(|n| [n.x, n.y]), size);
    let mut out = svg_open(size, &format!("sequence graph {}", doc.level_id));
    for n in &doc.nodes {
        let p = frame.map([n.x, n.y]);
        let fill = if n.completed { "#4caf50" } else { "#f48fb1" };
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"{fill}\" stroke=\"#222\" stroke-width=\"0.5\"><title>sequence {} popularity {}</title></circle>",
            p[0], p[1], n.radius, n.sequence_id, n.popularity
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\" dy=\"3\">{}</text>",
            p[0], p[1], n.sequence_id
        );
    }
    out.push_str("</svg>\n");
    out
}

fn svg_open(size: f64, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n  <title>{title}</title>\n  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}
