//! On-disk datasets: the precompute step that writes them and the loader the
//! server reads them with.
//!
//! Layout of a dataset directory:
//!
//! ```text
//! dataset.json                 level list, ingest summary, build metadata
//! <level_id>/level.json        level config
//! <level_id>/state-graph.json  node-link state graph with positions
//! <level_id>/sequence-graph.json
//! <level_id>/sequences.json    unique sequences with members
//! <level_id>/meta.json         hashes and counts
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use glyph_core::export::{
    analyze_level, AnalysisConfig, AnalysisError, SequenceGraphDoc, SequenceRecord, StateGraphDoc,
};
use glyph_core::game::{Level, LevelConfig, LevelError};
use glyph_core::ingest::{parse_trace_log, segment_by_level, IngestWarning, UniqueSequence};
use glyph_core::stategraph::SequencePath;
use glyph_core::text::level_info_text;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Level { path: PathBuf, source: LevelError },
    #[error("level id {0:?} is not usable as a directory name")]
    BadLevelId(String),
    #[error("level {0} is defined twice")]
    DuplicateLevel(String),
    #[error("no level configs found in {0}")]
    NoLevels(PathBuf),
    #[error("no accepted traces for any known level")]
    NoTraces,
    #[error("level {level}: {source}")]
    Analysis { level: String, source: AnalysisError },
    #[error("dataset not found at {0}")]
    Missing(PathBuf),
    #[error("level {level}: stored sequences do not match the state graph")]
    Inconsistent { level: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Json { path: path.to_path_buf(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), DatasetError> {
    let mut text = serde_json::to_string_pretty(value).expect("documents serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn valid_level_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Reads every `*.json` level config in `dir`, keyed by level id.
pub fn load_levels(dir: &Path) -> Result<BTreeMap<String, Level>, DatasetError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut levels = BTreeMap::new();
    for path in paths {
        let level = load_level(&path)?;
        let id = level.id().to_string();
        if levels.insert(id.clone(), level).is_some() {
            return Err(DatasetError::DuplicateLevel(id));
        }
    }
    if levels.is_empty() {
        return Err(DatasetError::NoLevels(dir.to_path_buf()));
    }
    Ok(levels)
}

pub fn load_level(path: &Path) -> Result<Level, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let level = Level::from_json(&text).map_err(|source| DatasetError::Level { path: path.to_path_buf(), source })?;
    if !valid_level_id(level.id()) {
        return Err(DatasetError::BadLevelId(level.id().to_string()));
    }
    Ok(level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level_id: String,
    pub trace_count: usize,
    pub sequence_count: usize,
    pub state_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildInfo {
    pub tool_version: String,
    /// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` when set.
    pub build_timestamp: Option<u64>,
    pub config_hash: String,
    pub input_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub dataset_id: String,
    pub levels: Vec<LevelSummary>,
    pub lines_read: usize,
    pub excluded_traces: usize,
    pub warnings: Vec<String>,
    /// Levels with a config but no accepted traces.
    pub skipped_levels: Vec<String>,
    pub config: AnalysisConfig,
    pub build: BuildInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMeta {
    pub level_id: String,
    pub tool_version: String,
    pub build_timestamp: Option<u64>,
    pub config_hash: String,
    pub level_hash: String,
    pub input_hash: String,
    pub trace_count: usize,
    pub sequence_count: usize,
    pub state_count: usize,
    pub edge_count: usize,
    pub big: u64,
}

#[derive(Debug, Clone, Default)]
pub struct PrecomputeOptions {
    pub analysis: AnalysisConfig,
    /// Worker threads for per-level analysis; 0 uses the default pool.
    pub jobs: usize,
    pub dataset_id: Option<String>,
}

fn build_timestamp() -> Option<u64> {
    std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()
}

fn config_hash(cfg: &AnalysisConfig) -> String {
    sha256_hex(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

/// Runs ingest, state graph, distances and layouts for every level with
/// traces and writes the dataset to `out`. Output is written to a sibling
/// temporary directory first and moved into place only when complete.
pub fn precompute(
    traces: &Path,
    levels_dir: &Path,
    out: &Path,
    options: &PrecomputeOptions,
) -> Result<DatasetIndex, DatasetError> {
    let levels = load_levels(levels_dir)?;
    let input = fs::read(traces).map_err(io_err(traces))?;
    let report = parse_trace_log(BufReader::new(input.as_slice()), &levels).map_err(io_err(traces))?;
    let by_level = segment_by_level(report.traces);
    if by_level.is_empty() {
        return Err(DatasetError::NoTraces);
    }

    let cfg = &options.analysis;
    let run = || {
        by_level
            .par_iter()
            .map(|(id, traces)| {
                analyze_level(&levels[id], traces, cfg)
                    .map_err(|source| DatasetError::Analysis { level: id.clone(), source })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let analyses = if options.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .expect("thread pool builds")
            .install(run)?
    } else {
        run()?
    };

    let build = BuildInfo {
        tool_version: TOOL_VERSION.to_string(),
        build_timestamp: build_timestamp(),
        config_hash: config_hash(cfg),
        input_hash: sha256_hex(&input),
    };
    let index = DatasetIndex {
        dataset_id: options.dataset_id.clone().unwrap_or_else(|| {
            out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into())
        }),
        levels: analyses
            .iter()
            .map(|a| LevelSummary {
                level_id: a.level.id().to_string(),
                trace_count: a.trace_count,
                sequence_count: a.sequences.len(),
                state_count: a.graph.nodes.len(),
            })
            .collect(),
        lines_read: report.lines_read,
        excluded_traces: report.excluded_traces,
        warnings: report.warnings.iter().map(IngestWarning::to_string).collect(),
        skipped_levels: levels.keys().filter(|id| !by_level.contains_key(*id)).cloned().collect(),
        config: cfg.clone(),
        build: build.clone(),
    };

    let staging = staging_path(out);
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(io_err(&staging))?;
    }
    let written = (|| {
        fs::create_dir_all(&staging).map_err(io_err(&staging))?;
        write_json(&staging.join("dataset.json"), &index)?;
        for a in &analyses {
            let dir = staging.join(a.level.id());
            fs::create_dir(&dir).map_err(io_err(&dir))?;
            write_json(&dir.join("level.json"), a.level.config())?;
            write_json(&dir.join("state-graph.json"), &a.state_graph_doc(cfg))?;
            write_json(&dir.join("sequence-graph.json"), &a.sequence_graph_doc(cfg))?;
            write_json(&dir.join("sequences.json"), &a.sequence_records())?;
            let meta = LevelMeta {
                level_id: a.level.id().to_string(),
                tool_version: build.tool_version.clone(),
                build_timestamp: build.build_timestamp,
                config_hash: build.config_hash.clone(),
                level_hash: sha256_hex(serde_json::to_string(a.level.config()).expect("serializes").as_bytes()),
                input_hash: build.input_hash.clone(),
                trace_count: a.trace_count,
                sequence_count: a.sequences.len(),
                state_count: a.graph.nodes.len(),
                edge_count: a.graph.edges.len(),
                big: a.big,
            };
            write_json(&dir.join("meta.json"), &meta)?;
        }
        if out.exists() {
            fs::remove_dir_all(out).map_err(io_err(out))?;
        }
        fs::rename(&staging, out).map_err(io_err(out))
    })();
    if written.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    written.map(|()| index)
}

fn staging_path(out: &Path) -> PathBuf {
    let name = out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into());
    out.with_file_name(format!(".{name}.partial"))
}

/// One level of a loaded dataset.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub level: Level,
    pub summary: LevelSummary,
    pub info_text: String,
    pub state_graph: StateGraphDoc,
    pub sequence_graph: SequenceGraphDoc,
    pub sequences: Vec<UniqueSequence>,
    pub paths: BTreeMap<usize, SequencePath>,
    pub meta: LevelMeta,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub root: PathBuf,
    pub index: DatasetIndex,
    pub levels: BTreeMap<String, LevelData>,
}

impl Dataset {
    pub fn load(root: &Path) -> Result<Dataset, DatasetError> {
        let index_path = root.join("dataset.json");
        if !index_path.is_file() {
            return Err(DatasetError::Missing(root.to_path_buf()));
        }
        let index: DatasetIndex = read_json(&index_path)?;
        let mut levels = BTreeMap::new();
        for summary in &index.levels {
            let id = &summary.level_id;
            if !valid_level_id(id) {
                return Err(DatasetError::BadLevelId(id.clone()));
            }
            let dir = root.join(id);
            let config: LevelConfig = read_json(&dir.join("level.json"))?;
            let level = config
                .validate()
                .map_err(|source| DatasetError::Level { path: dir.join("level.json"), source })?;
            let state_graph: StateGraphDoc = read_json(&dir.join("state-graph.json"))?;
            let sequence_graph: SequenceGraphDoc = read_json(&dir.join("sequence-graph.json"))?;
            let records: Vec<SequenceRecord> = read_json(&dir.join("sequences.json"))?;
            let meta: LevelMeta = read_json(&dir.join("meta.json"))?;
            let sequences = records
                .iter()
                .map(|r| r.to_sequence(&level))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| DatasetError::Analysis { level: id.clone(), source })?;
            let paths: BTreeMap<usize, SequencePath> = state_graph
                .paths
                .iter()
                .map(|(&sequence_id, node_ids)| SequencePath {
                    sequence_id,
                    node_ids: node_ids.clone(),
                    edge_ids: state_graph.path_edges.get(&sequence_id).cloned().unwrap_or_default(),
                })
                .map(|p| (p.sequence_id, p))
                .collect();
            if sequences.iter().any(|s| !paths.contains_key(&s.sequence_id)) {
                return Err(DatasetError::Inconsistent { level: id.clone() });
            }
            levels.insert(
                id.clone(),
                LevelData {
                    info_text: level_info_text(&level),
                    level,
                    summary: summary.clone(),
                    state_graph,
                    sequence_graph,
                    sequences,
                    paths,
                    meta,
                },
            );
        }
        Ok(Dataset { root: root.to_path_buf(), index, levels })
    }
}
