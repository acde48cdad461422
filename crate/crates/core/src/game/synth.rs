//! Synthetic play-trace generation for fixtures and demos.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::level::Level;
use super::mechanics::MoveAction;
use super::search::shortest_path;
use super::trace::PlayTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Fewest moves to any end state.
    Optimal,
    /// Repeatedly heads for the nearest state holding one more key.
    GreedyKey,
    /// Reaches the optimal end state using single-turn moves only.
    OneStep,
    /// Uniformly random moves; may quit before completing.
    Random,
    /// Draws one of the other policies per trace.
    Mixed,
}

impl Policy {
    pub const ALL: [Policy; 5] =
        [Policy::Optimal, Policy::GreedyKey, Policy::OneStep, Policy::Random, Policy::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Optimal => "optimal",
            Policy::GreedyKey => "greedy-key",
            Policy::OneStep => "one-step",
            Policy::Random => "random",
            Policy::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown policy {s:?}"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynthError {
    #[error("level {0} cannot be completed from its start position")]
    Uncompletable(String),
    #[error("level {level}: policy {policy} cannot reach an end state")]
    PolicyInfeasible { level: String, policy: Policy },
}

const RANDOM_QUIT_PROBABILITY: f64 = 0.1;
const RANDOM_MAX_MOVES: usize = 25;

/// Moves of one trace under `policy`. `Mixed` must be resolved by the caller.
fn plan(level: &Level, policy: Policy, rng: &mut ChaCha8Rng) -> Result<Vec<MoveAction>, SynthError> {
    let moves = level.enumerate_moves();
    let start = level.initial_state();
    let optimal = || {
        shortest_path(level, start, &moves, None, |s| level.is_end_state(s), |_| true)
            .ok_or_else(|| SynthError::Uncompletable(level.id().to_string()))
    };
    match policy {
        Policy::Optimal => optimal(),
        Policy::OneStep => {
            let target = *level.replay(&optimal()?).expect("planned moves are legal").last().unwrap();
            let single: Vec<MoveAction> = moves.iter().copied().filter(|m| m.turns == 1).collect();
            shortest_path(level, start, &single, None, |s| *s == target, |_| true)
                .or_else(|| {
                    shortest_path(level, start, &single, None, |s| level.is_end_state(s), |_| true)
                })
                .ok_or(SynthError::PolicyInfeasible { level: level.id().to_string(), policy })
        }
        Policy::GreedyKey => {
            optimal()?;
            let keys = level.key_mask();
            let mut path = Vec::new();
            let mut state = start;
            while !level.is_end_state(&state) {
                let held = (state.collected.bits() & keys.bits()).count_ones();
                let leg = shortest_path(
                    level,
                    state,
                    &moves,
                    None,
                    |s| (s.collected.bits() & keys.bits()).count_ones() > held,
                    |_| true,
                )
                .ok_or(SynthError::PolicyInfeasible { level: level.id().to_string(), policy })?;
                for action in leg {
                    state = level.step(&state, &action);
                    path.push(action);
                }
            }
            Ok(path)
        }
        Policy::Random => {
            optimal()?;
            let mut path = Vec::new();
            let mut state = start;
            while path.len() < RANDOM_MAX_MOVES && !level.is_end_state(&state) {
                if !path.is_empty() && rng.gen_bool(RANDOM_QUIT_PROBABILITY) {
                    break;
                }
                let action = *moves.choose(rng).expect("levels have at least one move");
                state = level.step(&state, &action);
                path.push(action);
            }
            Ok(path)
        }
        Policy::Mixed => unreachable!("mixed policy is resolved per trace"),
    }
}

fn resolve_mixed(rng: &mut ChaCha8Rng) -> Policy {
    let roll: f64 = rng.gen();
    match roll {
        r if r < 0.5 => Policy::Optimal,
        r if r < 0.7 => Policy::GreedyKey,
        r if r < 0.85 => Policy::OneStep,
        _ => Policy::Random,
    }
}

/// Generates `count` traces for `level`. Trace `i` belongs to player `u<i>` in session `s1`.
/// Output depends only on the arguments.
pub fn generate_synthetic_traces(
    level: &Level,
    policy: Policy,
    count: usize,
    seed: u64,
) -> Result<Vec<PlayTrace>, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces = Vec::with_capacity(count);
    for index in 0..count {
        let chosen = match policy {
            Policy::Mixed => resolve_mixed(&mut rng),
            p => p,
        };
        let moves = plan(level, chosen, &mut rng)?;
        let trace = PlayTrace::replay(level, format!("u{index:04}"), "s1", moves)
            .expect("planned moves are legal");
        traces.push(trace);
    }
    Ok(traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn t1_optimal_and_one_step() {
        let level = fixtures::t1_level();
        let opt = generate_synthetic_traces(&level, Policy::Optimal, 1, 0).unwrap();
        assert_eq!(opt[0].moves, [MoveAction::cw(0, 3)]);
        let one = generate_synthetic_traces(&level, Policy::OneStep, 1, 0).unwrap();
        assert_eq!(one[0].moves, [MoveAction::cw(0, 1); 3]);
        assert_eq!(one[0].states.last(), opt[0].states.last());
    }

    #[test]
    fn zero_count_is_empty() {
        assert!(generate_synthetic_traces(&fixtures::t1_level(), Policy::Random, 0, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn uncompletable_level_errors() {
        // cogs of 2 teeth on an even wheel never reach an odd peg
        let level = crate::game::LevelConfig {
            level_id: "odd".into(),
            wheel_size: 10,
            cogs: vec![2],
            keys: vec![3],
            bonuses: vec![],
            start_position: 0,
            max_turns_per_move: 5,
            key_points: 1,
        }
        .validate()
        .unwrap();
        assert_eq!(
            generate_synthetic_traces(&level, Policy::Optimal, 1, 0),
            Err(SynthError::Uncompletable("odd".into()))
        );
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let level = fixtures::fig3_level();
        let a = generate_synthetic_traces(&level, Policy::Mixed, 40, 7).unwrap();
        let b = generate_synthetic_traces(&level, Policy::Mixed, 40, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_traces(&level, Policy::Mixed, 40, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn deterministic_policies_complete() {
        let level = fixtures::fig3_level();
        for policy in [Policy::Optimal, Policy::GreedyKey, Policy::OneStep] {
            let traces = generate_synthetic_traces(&level, policy, 3, 1).unwrap();
            assert!(traces.iter().all(|t| t.completed), "{policy}");
            if policy == Policy::OneStep {
                assert!(traces[0].moves.iter().all(|m| m.turns == 1));
            }
        }
    }

    #[test]
    fn replay_closure() {
        let level = fixtures::fig3_level();
        for trace in generate_synthetic_traces(&level, Policy::Mixed, 30, 3).unwrap() {
            let mut state = level.initial_state();
            assert_eq!(trace.states[0], state);
            for (i, action) in trace.moves.iter().enumerate() {
                state = level.apply_move(&state, action).unwrap().0;
                assert_eq!(trace.states[i + 1], state);
            }
            assert_eq!(trace.completed, level.is_end_state(&state));
        }
    }

    #[test]
    fn policy_names_parse() {
        for p in Policy::ALL {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
        }
        assert!("lazy".parse::<Policy>().is_err());
    }
}
