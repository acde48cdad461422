//! Action-count state difference, dynamic time warping over state sequences, and
//! the pairwise sequence distance matrix.
//!
//! The difference between two states is the fewest moves turning one into the
//! other, taking whichever direction is feasible (the smaller if both are).
//! Pickups are monotone, so a direction is infeasible whenever the source holds
//! an item the target lacks. Unreachable pairs get a large finite stand-in for
//! infinity, `big`.

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::game::search::shortest_len;
use crate::game::{GameState, Level, MoveAction};
use crate::ingest::UniqueSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceConfig {
    /// Stand-in for infinity; defaults to `(depth_cap + 1) * (longest sequence + 1)`.
    pub big: Option<u64>,
    /// Search depth limit; defaults to wheel size plus item count.
    pub bfs_depth_cap: Option<u32>,
    /// Maximum memoized state pairs.
    pub cache_capacity: usize,
    /// Skip successors that picked up an item the target lacks.
    pub prune_monotone: bool,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            big: None,
            bfs_depth_cap: None,
            cache_capacity: 1 << 20,
            prune_monotone: true,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("big = {big} does not exceed depth cap {cap} x longest sequence {longest}")]
    BigTooSmall { big: u64, cap: u32, longest: usize },
    #[error("sequence distance needs non-empty sequences")]
    EmptySequence,
    #[error("distance matrix needs at least one sequence")]
    NoSequences,
}

/// State metric bound to one level, with a shared memo of state-pair distances.
pub struct StateMetric<'a> {
    level: &'a Level,
    moves: Vec<MoveAction>,
    big: u64,
    depth_cap: u32,
    prune: bool,
    cache: DashMap<(GameState, GameState), u64>,
    cache_capacity: usize,
}

impl<'a> StateMetric<'a> {
    /// `longest` is the longest state sequence this metric will be used on.
    pub fn new(level: &'a Level, cfg: &DistanceConfig, longest: usize) -> Result<Self, DistanceError> {
        let depth_cap = cfg
            .bfs_depth_cap
            .unwrap_or(level.wheel_size() + level.items().len() as u32);
        let big = cfg
            .big
            .unwrap_or((u64::from(depth_cap) + 1) * (longest as u64 + 1));
        if big <= u64::from(depth_cap) * longest as u64 {
            return Err(DistanceError::BigTooSmall { big, cap: depth_cap, longest });
        }
        Ok(StateMetric {
            level,
            moves: level.enumerate_moves(),
            big,
            depth_cap,
            prune: cfg.prune_monotone,
            cache: DashMap::new(),
            cache_capacity: cfg.cache_capacity,
        })
    }

    pub fn big(&self) -> u64 {
        self.big
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    pub fn cached_pairs(&self) -> usize {
        self.cache.len()
    }

    fn directed(&self, from: GameState, to: GameState) -> Option<u32> {
        if !from.collected.is_subset(to.collected) {
            return None;
        }
        let target = to.collected;
        let prune = self.prune;
        shortest_len(self.level, from, to, &self.moves, self.depth_cap, |s| {
            !prune || s.collected.is_subset(target)
        })
    }

    pub fn distance(&self, a: &GameState, b: &GameState) -> u64 {
        if a == b {
            return 0;
        }
        let key = if a < b { (*a, *b) } else { (*b, *a) };
        if let Some(hit) = self.cache.get(&key) {
            return *hit;
        }
        let value = match (self.directed(*a, *b), self.directed(*b, *a)) {
            (Some(x), Some(y)) => u64::from(x.min(y)),
            (Some(x), None) | (None, Some(x)) => u64::from(x),
            (None, None) => self.big,
        };
        if self.cache.len() < self.cache_capacity {
            self.cache.insert(key, value);
        }
        value
    }

    /// Warping distance: `D(0,0) = 0`, `D(i,0) = D(0,j) = big`,
    /// `D(i,j) = d(a_i, b_j) + min(D(i-1,j), D(i,j-1), D(i-1,j-1))`.
    pub fn dtw(&self, a: &[GameState], b: &[GameState]) -> Result<u64, DistanceError> {
        if a.is_empty() || b.is_empty() {
            return Err(DistanceError::EmptySequence);
        }
        let width = b.len() + 1;
        let mut prev = vec![self.big; width];
        prev[0] = 0;
        let mut row = vec![0u64; width];
        for sa in a {
            row[0] = self.big;
            for (j, sb) in b.iter().enumerate() {
                let best = prev[j].min(prev[j + 1]).min(row[j]);
                row[j + 1] = self.distance(sa, sb).saturating_add(best);
            }
            std::mem::swap(&mut prev, &mut row);
        }
        Ok(prev[b.len()])
    }
}

/// Single-pair convenience over [`StateMetric::distance`]. A `big` of zero is raised to one.
pub fn state_distance(level: &Level, a: &GameState, b: &GameState, cfg: &DistanceConfig) -> u64 {
    let cfg = DistanceConfig { big: cfg.big.map(|b| b.max(1)), ..*cfg };
    StateMetric::new(level, &cfg, 0)
        .expect("any positive big dominates an empty sequence")
        .distance(a, b)
}

pub fn dtw_distance(
    a: &[GameState],
    b: &[GameState],
    level: &Level,
    cfg: &DistanceConfig,
) -> Result<u64, DistanceError> {
    let metric = StateMetric::new(level, cfg, a.len().max(b.len()))?;
    metric.dtw(a, b)
}

/// Symmetric sequence distances, row-major, indexed by position in `order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub order: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn from_rows(order: Vec<usize>, values: Vec<Vec<f64>>) -> DistanceMatrix {
        DistanceMatrix { order, values }
    }

    /// Problems with symmetry, diagonal or sign, as human-readable strings.
    pub fn invariant_violations(&self) -> Vec<String> {
        let n = self.len();
        let mut problems = Vec::new();
        if self.values.len() != n || self.values.iter().any(|r| r.len() != n) {
            problems.push(format!("matrix is not {n}x{n}"));
            return problems;
        }
        for i in 0..n {
            if self.values[i][i] != 0.0 {
                problems.push(format!("diagonal ({i},{i}) = {}", self.values[i][i]));
            }
            for j in 0..n {
                let v = self.values[i][j];
                if v.is_nan() || v < 0.0 {
                    problems.push(format!("({i},{j}) = {v}"));
                }
                if j > i && v != self.values[j][i] {
                    problems.push(format!("({i},{j}) = {v} but ({j},{i}) = {}", self.values[j][i]));
                }
            }
        }
        problems
    }

    /// CSV with a header row of sequence ids.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sequence_id");
        for id in &self.order {
            out.push_str(&format!(",{id}"));
        }
        out.push('\n');
        for (id, row) in self.order.iter().zip(&self.values) {
            out.push_str(&id.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Largest entry strictly below `big`, i.e. the largest finite distance.
pub fn max_finite(matrix: &DistanceMatrix, big: f64) -> f64 {
    matrix
        .values
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v < big)
        .fold(0.0, f64::max)
}

/// All pairwise warping distances between `sequences`, in the given order.
/// Pairs are computed under `cfg.exec`; the result does not depend on it.
pub fn build_distance_matrix(
    sequences: &[UniqueSequence],
    level: &Level,
    cfg: &DistanceConfig,
) -> Result<(DistanceMatrix, u64), DistanceError> {
    if sequences.is_empty() {
        return Err(DistanceError::NoSequences);
    }
    let longest = sequences.iter().map(|s| s.states.len()).max().unwrap_or(0);
    let metric = StateMetric::new(level, cfg, longest)?;
    let n = sequences.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results = cfg
        .exec
        .map_slice(&pairs, |&(i, j)| metric.dtw(&sequences[i].states, &sequences[j].states));
    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), d) in pairs.iter().zip(results) {
        let d = d? as f64;
        values[i][j] = d;
        values[j][i] = d;
    }
    let order = sequences.iter().map(|s| s.sequence_id).collect();
    Ok((DistanceMatrix { order, values }, metric.big()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::ItemSet;

    fn t1_states() -> (Level, GameState, GameState, GameState) {
        let level = fixtures::t1_level();
        let start = level.initial_state();
        let with_key = level.state_from_ids(3, &["key@3".parse().unwrap()]).unwrap();
        let bare = GameState::new(3, ItemSet::EMPTY);
        (level, start, with_key, bare)
    }

    #[test]
    fn t1_examples() {
        let (level, start, with_key, bare) = t1_states();
        let cfg = DistanceConfig::default();
        assert_eq!(state_distance(&level, &start, &start, &cfg), 0);
        assert_eq!(state_distance(&level, &start, &with_key, &cfg), 1);
        // entering peg 3 always collects the key, so only (3,{}) -> (0,{}) is feasible,
        // and counter-clockwise 3 does it in one move
        assert_eq!(state_distance(&level, &start, &bare, &cfg), 1);
        assert_eq!(state_distance(&level, &bare, &start, &cfg), 1);
    }

    #[test]
    fn infeasible_pairs_are_big() {
        let level = fixtures::strategy_level();
        let key_only = level.state_from_ids(35, &["key@35".parse().unwrap()]).unwrap();
        let bonus_only = level.state_from_ids(10, &["bonus@10".parse().unwrap()]).unwrap();
        let cfg = DistanceConfig { big: Some(1000), ..Default::default() };
        assert_eq!(state_distance(&level, &key_only, &bonus_only, &cfg), 1000);
    }

    #[test]
    fn dtw_t1_example() {
        let (level, start, with_key, _) = t1_states();
        let a = [start, with_key];
        let b = [start, GameState::new(1, ItemSet::EMPTY), GameState::new(2, ItemSet::EMPTY), with_key];
        let cfg = DistanceConfig::default();
        assert_eq!(dtw_distance(&a, &b, &level, &cfg), Ok(2));
        assert_eq!(dtw_distance(&b, &a, &level, &cfg), Ok(2));
        assert_eq!(dtw_distance(&a, &a, &level, &cfg), Ok(0));
        assert_eq!(dtw_distance(&a, &[], &level, &cfg), Err(DistanceError::EmptySequence));
    }

    #[test]
    fn big_must_dominate() {
        let level = fixtures::t1_level();
        let cfg = DistanceConfig { big: Some(10), bfs_depth_cap: Some(5), ..Default::default() };
        assert!(StateMetric::new(&level, &cfg, 2).is_err());
        assert!(StateMetric::new(&level, &cfg, 1).is_ok());
        let seqs = crate::ingest::dedup_sequences(&fixtures::strategy_corpus([1, 1, 1, 1]));
        let tiny = DistanceConfig { big: Some(3), ..Default::default() };
        assert!(matches!(
            build_distance_matrix(&seqs, &fixtures::strategy_level(), &tiny),
            Err(DistanceError::BigTooSmall { .. })
        ));
    }

    #[test]
    fn small_matrices() {
        let level = fixtures::strategy_level();
        let seqs = crate::ingest::dedup_sequences(&fixtures::strategy_corpus([2, 1, 0, 0]));
        let (one, _) = build_distance_matrix(&seqs[..1], &level, &DistanceConfig::default()).unwrap();
        assert_eq!(one.values, [[0.0]]);
        let (two, _) = build_distance_matrix(&seqs, &level, &DistanceConfig::default()).unwrap();
        let d = dtw_distance(&seqs[0].states, &seqs[1].states, &level, &DistanceConfig::default()).unwrap();
        assert_eq!(two.values, [[0.0, d as f64], [d as f64, 0.0]]);
        assert!(two.invariant_violations().is_empty());
        assert_eq!(
            build_distance_matrix(&[], &level, &DistanceConfig::default()).unwrap_err(),
            DistanceError::NoSequences
        );
    }

    #[test]
    fn csv_has_header_and_zero_diagonal() {
        let m = DistanceMatrix::from_rows(vec![0, 3], vec![vec![0.0, 4.0], vec![4.0, 0.0]]);
        assert_eq!(m.to_csv(), "sequence_id,0,3\n0,0,4\n3,4,0\n");
    }
}
