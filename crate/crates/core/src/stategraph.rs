//! Population-level state graph: one node per distinct game state, one edge per
//! distinct (from, to, move) transition, all counts weighted by sequence popularity.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::game::{GameState, Level, MoveAction};
use crate::ingest::UniqueSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Start,
    End,
    Mid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateNode {
    pub node_id: usize,
    pub state: GameState,
    pub visits: u64,
    pub starts: u64,
    pub terminations: u64,
    pub class: NodeClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEdge {
    pub edge_id: usize,
    pub from: usize,
    pub to: usize,
    pub action: MoveAction,
    pub traversals: u64,
}

/// Route of one unique sequence through the graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePath {
    pub sequence_id: usize,
    pub node_ids: Vec<usize>,
    pub edge_ids: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGraph {
    pub level_id: String,
    pub nodes: Vec<StateNode>,
    pub edges: Vec<ActionEdge>,
}

pub fn build_state_graph(
    level: &Level,
    sequences: &[UniqueSequence],
) -> (StateGraph, BTreeMap<usize, SequencePath>) {
    let initial = level.initial_state();
    let mut graph = StateGraph { level_id: level.id().to_string(), nodes: Vec::new(), edges: Vec::new() };
    let mut node_of: HashMap<GameState, usize> = HashMap::new();
    let mut edge_of: HashMap<(usize, usize, MoveAction), usize> = HashMap::new();
    let mut paths = BTreeMap::new();

    for seq in sequences {
        let weight = seq.popularity as u64;
        let mut node_ids = Vec::with_capacity(seq.states.len());
        for state in &seq.states {
            let id = *node_of.entry(*state).or_insert_with(|| {
                let class = if *state == initial {
                    NodeClass::Start
                } else if level.is_end_state(state) {
                    NodeClass::End
                } else {
                    NodeClass::Mid
                };
                graph.nodes.push(StateNode {
                    node_id: graph.nodes.len(),
                    state: *state,
                    visits: 0,
                    starts: 0,
                    terminations: 0,
                    class,
                });
                graph.nodes.len() - 1
            });
            graph.nodes[id].visits += weight;
            node_ids.push(id);
        }
        if let (Some(&first), Some(&last)) = (node_ids.first(), node_ids.last()) {
            graph.nodes[first].starts += weight;
            graph.nodes[last].terminations += weight;
        }

        let mut edge_ids = Vec::with_capacity(seq.moves.len());
        for (pair, action) in node_ids.windows(2).zip(&seq.moves) {
            let key = (pair[0], pair[1], *action);
            let id = *edge_of.entry(key).or_insert_with(|| {
                graph.edges.push(ActionEdge {
                    edge_id: graph.edges.len(),
                    from: pair[0],
                    to: pair[1],
                    action: *action,
                    traversals: 0,
                });
                graph.edges.len() - 1
            });
            graph.edges[id].traversals += weight;
            edge_ids.push(id);
        }
        paths.insert(seq.sequence_id, SequencePath { sequence_id: seq.sequence_id, node_ids, edge_ids });
    }
    debug_assert!(end_node_exits(&graph).is_empty(), "completion ends a level");
    (graph, paths)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowViolation {
    pub node_id: usize,
    /// starts + incoming traversals
    pub inflow: u64,
    /// terminations + outgoing traversals
    pub outflow: u64,
}

/// Nodes where `starts + in != terminations + out`.
pub fn node_flow_check(graph: &StateGraph) -> Vec<FlowViolation> {
    let mut inflow: Vec<u64> = graph.nodes.iter().map(|n| n.starts).collect();
    let mut outflow: Vec<u64> = graph.nodes.iter().map(|n| n.terminations).collect();
    for edge in &graph.edges {
        outflow[edge.from] += edge.traversals;
        inflow[edge.to] += edge.traversals;
    }
    inflow
        .into_iter()
        .zip(outflow)
        .enumerate()
        .filter(|(_, (i, o))| i != o)
        .map(|(node_id, (inflow, outflow))| FlowViolation { node_id, inflow, outflow })
        .collect()
}

/// End-class nodes with outgoing edges (none for a well-formed graph).
pub fn end_node_exits(graph: &StateGraph) -> Vec<usize> {
    let mut ids: Vec<usize> = graph
        .edges
        .iter()
        .filter(|e| graph.nodes[e.from].class == NodeClass::End)
        .map(|e| e.from)
        .collect();
    ids.dedup();
    ids
}

impl StateGraph {
    pub fn max_visits(&self) -> u64 {
        self.nodes.iter().map(|n| n.visits).max().unwrap_or(0)
    }

    pub fn max_traversals(&self) -> u64 {
        self.edges.iter().map(|e| e.traversals).max().unwrap_or(0)
    }

    /// Undirected simple edge list for layout: self-loops dropped, parallel edges merged.
    pub fn layout_edges(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.from != e.to)
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

impl SequencePath {
    /// States along the path, for checking it against its sequence.
    pub fn states(&self, graph: &StateGraph) -> Vec<GameState> {
        self.node_ids.iter().map(|&id| graph.nodes[id].state).collect()
    }

    /// True when every listed edge joins the consecutive nodes it sits between.
    pub fn is_connected(&self, graph: &StateGraph) -> bool {
        self.edge_ids.len() + 1 == self.node_ids.len()
            && self.edge_ids.iter().zip(self.node_ids.windows(2)).all(|(&e, pair)| {
                graph.edges.get(e).is_some_and(|edge| edge.from == pair[0] && edge.to == pair[1])
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ingest::dedup_sequences;

    #[test]
    fn single_sequence() {
        let level = fixtures::t1_level();
        let trace = crate::game::PlayTrace::replay(&level, "a", "s", vec![MoveAction::cw(0, 3)]).unwrap();
        let seqs = dedup_sequences(&[trace]);
        let (graph, paths) = build_state_graph(&level, &seqs);
        assert_eq!(graph.nodes.len(), 2);
        assert_eq!(graph.edges.len(), 1);
        assert_eq!(graph.edges[0].traversals, 1);
        assert_eq!(graph.nodes[0].class, NodeClass::Start);
        assert_eq!(graph.nodes[1].class, NodeClass::End);
        assert_eq!(paths[&0].node_ids, [0, 1]);
    }

    #[test]
    fn shared_prefix_sums_counts() {
        let level = fixtures::t1_level();
        let mk = |p: &str, m: Vec<MoveAction>| crate::game::PlayTrace::replay(&level, p, "s", m).unwrap();
        let traces = vec![
            mk("a", vec![MoveAction::cw(0, 1), MoveAction::cw(0, 2)]),
            mk("b", vec![MoveAction::cw(0, 1), MoveAction::cw(0, 4)]),
            mk("c", vec![MoveAction::cw(0, 1), MoveAction::cw(0, 4)]),
        ];
        let (graph, _) = build_state_graph(&level, &dedup_sequences(&traces));
        let after_first = graph.nodes.iter().find(|n| n.state.marker == 1).unwrap();
        assert_eq!(after_first.visits, 3);
        let shared = graph.edges.iter().find(|e| e.action == MoveAction::cw(0, 1)).unwrap();
        assert_eq!(shared.traversals, 3);
        assert!(node_flow_check(&graph).is_empty());
    }

    #[test]
    fn fixture_corpus_start_visits() {
        let level = fixtures::strategy_level();
        let seqs = dedup_sequences(&fixtures::strategy_corpus([50, 20, 5, 2]));
        let (graph, paths) = build_state_graph(&level, &seqs);
        let start: Vec<_> = graph.nodes.iter().filter(|n| n.class == NodeClass::Start).collect();
        assert_eq!(start.len(), 1);
        assert_eq!(start[0].visits, 77);
        assert!(node_flow_check(&graph).is_empty());
        for seq in &seqs {
            let path = &paths[&seq.sequence_id];
            assert!(path.is_connected(&graph));
            assert_eq!(path.states(&graph), seq.states);
        }
        assert!(end_node_exits(&graph).is_empty());
    }

    #[test]
    fn corrupted_graph_reports_one_violation() {
        let level = fixtures::strategy_level();
        let seqs = dedup_sequences(&fixtures::strategy_corpus([3, 2, 0, 0]));
        let (mut graph, _) = build_state_graph(&level, &seqs);
        let edge = graph.edges.iter_mut().find(|e| e.action == MoveAction::ccw(0, 5)).unwrap();
        edge.traversals -= 1;
        let (from, to) = (edge.from, edge.to);
        let flagged: Vec<usize> = node_flow_check(&graph).iter().map(|v| v.node_id).collect();
        assert_eq!(flagged, [from, to]);

        let (mut graph, _) = build_state_graph(&level, &seqs);
        graph.nodes[2].starts += 1;
        assert_eq!(node_flow_check(&graph).len(), 1);
    }

    #[test]
    fn layout_edges_are_simple() {
        let level = fixtures::t1_level();
        let mk = |p: &str, m: Vec<MoveAction>| crate::game::PlayTrace::replay(&level, p, "s", m).unwrap();
        // 0 -> 1 -> 0: two directed edges over one node pair
        let traces = vec![mk("a", vec![MoveAction::cw(0, 1), MoveAction::ccw(0, 1)])];
        let (graph, _) = build_state_graph(&level, &dedup_sequences(&traces));
        assert_eq!(graph.edges.len(), 2);
        assert_eq!(graph.layout_edges(), [(0, 1)]);
    }
}
