//! Independent reference implementations used to check the engine.

#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;

use rand::Rng;

use glyph_core::game::{Direction, GameState, Level, LevelConfig, MoveAction};

pub fn level(id: &str, wheel: u32, cogs: &[u32], keys: &[u32], bonuses: &[(u32, i64)], turns: u32) -> Level {
    LevelConfig {
        level_id: id.into(),
        wheel_size: wheel,
        cogs: cogs.to_vec(),
        keys: keys.to_vec(),
        bonuses: bonuses.to_vec(),
        start_position: 0,
        max_turns_per_move: turns,
        key_points: 1,
    }
    .validate()
    .unwrap()
}

/// Small levels whose full move trees can be walked.
pub fn tiny_levels() -> Vec<Level> {
    vec![
        level("tiny-a", 6, &[1], &[2], &[], 1),
        level("tiny-b", 7, &[1, 3], &[4], &[(2, 5)], 1),
        level("tiny-c", 5, &[1, 2], &[3], &[(1, 2)], 2),
        level("tiny-d", 8, &[3], &[5], &[(1, 1), (6, 1)], 2),
    ]
}

pub fn all_moves(level: &Level) -> Vec<MoveAction> {
    let mut moves = Vec::new();
    for cog in 0..level.cogs().len() {
        for direction in [Direction::Clockwise, Direction::CounterClockwise] {
            for turns in 1..=level.max_turns() {
                moves.push(MoveAction::new(cog, direction, turns));
            }
        }
    }
    moves
}

pub fn default_cap(level: &Level) -> u32 {
    level.wheel_size() + level.items().len() as u32
}

/// Every state reachable from the start, by plain closure over `apply_move`.
pub fn closure(level: &Level) -> Vec<GameState> {
    let moves = all_moves(level);
    let mut states = vec![level.initial_state()];
    let mut i = 0;
    while i < states.len() {
        let s = states[i];
        i += 1;
        for m in &moves {
            let (next, _) = level.apply_move(&s, m).unwrap();
            if !states.contains(&next) {
                states.push(next);
            }
        }
    }
    states
}

fn reaches_in(level: &Level, moves: &[MoveAction], from: GameState, to: GameState, depth: u32) -> bool {
    if from == to {
        return true;
    }
    if depth == 0 {
        return false;
    }
    moves.iter().any(|m| {
        let (next, _) = level.apply_move(&from, m).unwrap();
        reaches_in(level, moves, next, to, depth - 1)
    })
}

/// Fewest moves from `from` to `to` by trying every move sequence of length
/// 0, 1, 2, ... up to `cap`.
pub fn enumerate_directed(level: &Level, from: GameState, to: GameState, cap: u32) -> Option<u32> {
    if !from.collected.is_subset(to.collected) {
        return None;
    }
    let moves = all_moves(level);
    (0..=cap).find(|&len| reaches_in(level, &moves, from, to, len))
}

pub fn oracle_distance(level: &Level, a: GameState, b: GameState, cap: u32, big: u64) -> u64 {
    match (enumerate_directed(level, a, b, cap), enumerate_directed(level, b, a, cap)) {
        (Some(x), Some(y)) => u64::from(x.min(y)),
        (Some(x), None) | (None, Some(x)) => u64::from(x),
        (None, None) => big,
    }
}

/// All-pairs shortest move counts over the reachable states (Floyd-Warshall).
pub struct AllPairs {
    index: HashMap<GameState, usize>,
    dist: Vec<Vec<u32>>,
}

const UNREACHED: u32 = u32::MAX / 4;

impl AllPairs {
    pub fn new(level: &Level) -> AllPairs {
        let states = closure(level);
        let n = states.len();
        let index: HashMap<GameState, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut dist = vec![vec![UNREACHED; n]; n];
        for (i, s) in states.iter().enumerate() {
            dist[i][i] = 0;
            for m in all_moves(level) {
                let (next, _) = level.apply_move(s, &m).unwrap();
                let j = index[&next];
                if i != j {
                    dist[i][j] = 1;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i][k];
                if dik == UNREACHED {
                    continue;
                }
                for j in 0..n {
                    let via = dik + dist[k][j];
                    if via < dist[i][j] {
                        dist[i][j] = via;
                    }
                }
            }
        }
        AllPairs { index, dist }
    }

    pub fn directed(&self, from: GameState, to: GameState, cap: u32) -> Option<u32> {
        let d = self.dist[self.index[&from]][self.index[&to]];
        (d <= cap).then_some(d)
    }

    pub fn distance(&self, a: GameState, b: GameState, cap: u32, big: u64) -> u64 {
        match (self.directed(a, b, cap), self.directed(b, a, cap)) {
            (Some(x), Some(y)) => u64::from(x.min(y)),
            (Some(x), None) | (None, Some(x)) => u64::from(x),
            (None, None) => big,
        }
    }
}

/// Textbook warping table with `big` standing in for infinity on the borders.
pub fn reference_dtw(a: &[GameState], b: &[GameState], big: u64, d: impl Fn(GameState, GameState) -> u64) -> u64 {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0u64; m + 1]; n + 1];
    for row in table.iter_mut().skip(1) {
        row[0] = big;
    }
    for j in 1..=m {
        table[0][j] = big;
    }
    for i in 1..=n {
        for j in 1..=m {
            let best = table[i - 1][j].min(table[i][j - 1]).min(table[i - 1][j - 1]);
            table[i][j] = d(a[i - 1], b[j - 1]).saturating_add(best);
        }
    }
    table[n][m]
}

/// States of a random play of `moves` moves from the start.
pub fn random_walk(level: &Level, rng: &mut impl Rng, moves: usize) -> Vec<GameState> {
    let options = all_moves(level);
    let mut states = vec![level.initial_state()];
    for _ in 0..moves {
        let m = options[rng.gen_range(0..options.len())];
        let (next, _) = level.apply_move(states.last().unwrap(), &m).unwrap();
        states.push(next);
    }
    states
}

/// Random move list on `level` that stops as soon as the level is complete.
pub fn random_moves(level: &Level, rng: &mut impl Rng, max_moves: usize) -> Vec<MoveAction> {
    let options = all_moves(level);
    let mut state = level.initial_state();
    let mut moves = Vec::new();
    while moves.len() < max_moves && !level.is_end_state(&state) {
        let m = options[rng.gen_range(0..options.len())];
        state = level.apply_move(&state, &m).unwrap().0;
        moves.push(m);
    }
    moves
}
