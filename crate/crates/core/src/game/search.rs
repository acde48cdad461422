use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::level::Level;
use super::mechanics::MoveAction;
use super::state::GameState;

/// Breadth-first search from `start` over `moves`.
///
/// Successors rejected by `admissible` are never enqueued. Returns the first
/// (shortest, then earliest in `moves` order) path to a state satisfying
/// `is_goal`, or `None` if none exists within `max_depth` moves.
pub fn shortest_path(
    level: &Level,
    start: GameState,
    moves: &[MoveAction],
    max_depth: Option<u32>,
    mut is_goal: impl FnMut(&GameState) -> bool,
    mut admissible: impl FnMut(&GameState) -> bool,
) -> Option<Vec<MoveAction>> {
    if is_goal(&start) {
        return Some(Vec::new());
    }
    // state -> (parent, move, depth)
    let mut parents: HashMap<GameState, Option<(GameState, MoveAction, u32)>> = HashMap::new();
    parents.insert(start, None);
    let mut queue = VecDeque::from([(start, 0u32)]);
    while let Some((state, depth)) = queue.pop_front() {
        if max_depth.is_some_and(|cap| depth >= cap) {
            continue;
        }
        for action in moves {
            let next = level.step(&state, action);
            if !admissible(&next) {
                continue;
            }
            if let Entry::Vacant(slot) = parents.entry(next) {
                slot.insert(Some((state, *action, depth + 1)));
                if is_goal(&next) {
                    return Some(unwind(&parents, next));
                }
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

fn unwind(
    parents: &HashMap<GameState, Option<(GameState, MoveAction, u32)>>,
    mut state: GameState,
) -> Vec<MoveAction> {
    let mut path = Vec::new();
    while let Some(Some((parent, action, _))) = parents.get(&state) {
        path.push(*action);
        state = *parent;
    }
    path.reverse();
    path
}

/// Length of the shortest path, same contract as [`shortest_path`] but without
/// path bookkeeping.
pub fn shortest_len(
    level: &Level,
    start: GameState,
    target: GameState,
    moves: &[MoveAction],
    max_depth: u32,
    mut admissible: impl FnMut(&GameState) -> bool,
) -> Option<u32> {
    if start == target {
        return Some(0);
    }
    let mut seen = std::collections::HashSet::from([start]);
    let mut frontier = vec![start];
    for depth in 1..=max_depth {
        let mut next_frontier = Vec::new();
        for state in &frontier {
            for action in moves {
                let next = level.step(state, action);
                if next == target {
                    return Some(depth);
                }
                if admissible(&next) && seen.insert(next) {
                    next_frontier.push(next);
                }
            }
        }
        if next_frontier.is_empty() {
            break;
        }
        frontier = next_frontier;
    }
    None
}

/// Every state reachable from the level's initial state.
pub fn reachable_states(level: &Level) -> Vec<GameState> {
    let moves = level.enumerate_moves();
    let start = level.initial_state();
    let mut seen = std::collections::HashSet::from([start]);
    let mut order = vec![start];
    let mut i = 0;
    while i < order.len() {
        let state = order[i];
        i += 1;
        for action in &moves {
            let next = level.step(&state, action);
            if seen.insert(next) {
                order.push(next);
            }
        }
    }
    order
}
