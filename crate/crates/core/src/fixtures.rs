//! Built-in levels and hand-made corpora used by tests, benches and demos.

use crate::game::{Level, LevelConfig, MoveAction, PlayTrace};

/// Twelve-peg wheel, one single-tooth cog, one key on peg 3.
pub fn t1_level() -> Level {
    LevelConfig {
        level_id: "T1".into(),
        wheel_size: 12,
        cogs: vec![1],
        keys: vec![3],
        bonuses: vec![],
        start_position: 0,
        max_turns_per_move: 5,
        key_points: 1,
    }
    .validate()
    .expect("fixture level is valid")
}

/// Three cogs (3, 8, 13 teeth), keys on pegs 19 and 51 and one gem.
///
/// The wheel size (65) and the gem's peg (27) and value (10) are stand-ins: only
/// the cogs, keys and start peg come from the real level.
pub fn fig3_level() -> Level {
    LevelConfig {
        level_id: "fig3".into(),
        wheel_size: 65,
        cogs: vec![3, 8, 13],
        keys: vec![19, 51],
        bonuses: vec![(27, 10)],
        start_position: 0,
        max_turns_per_move: 5,
        key_points: 1,
    }
    .validate()
    .expect("fixture level is valid")
}

/// Forty pegs, cogs of 1 and 2 teeth, a key on peg 35 and bonuses on 5, 6 and 10.
/// Laid out so that the four [`Strategy`] move lists are all natural solutions.
pub fn strategy_level() -> Level {
    LevelConfig {
        level_id: "S1".into(),
        wheel_size: 40,
        cogs: vec![1, 2],
        keys: vec![35],
        bonuses: vec![(5, 10), (6, 10), (10, 10)],
        start_position: 0,
        max_turns_per_move: 5,
        key_points: 1,
    }
    .validate()
    .expect("fixture level is valid")
}

/// Four ways of solving [`strategy_level`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// One five-turn counter-clockwise move onto the key.
    CollectKey,
    /// The same path in five single-turn moves.
    OneStep,
    /// Detour for one bonus, then the key.
    OneBonus,
    /// Detour for two bonuses, back to start, then the key.
    TwoBonus,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::CollectKey, Strategy::OneStep, Strategy::OneBonus, Strategy::TwoBonus];

    pub fn moves(self) -> Vec<MoveAction> {
        match self {
            Strategy::CollectKey => vec![MoveAction::ccw(0, 5)],
            Strategy::OneStep => vec![MoveAction::ccw(0, 1); 5],
            Strategy::OneBonus => vec![MoveAction::cw(0, 5), MoveAction::ccw(1, 5)],
            Strategy::TwoBonus => {
                vec![MoveAction::cw(1, 5), MoveAction::ccw(1, 5), MoveAction::ccw(0, 5)]
            }
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::CollectKey => "key",
            Strategy::OneStep => "step",
            Strategy::OneBonus => "bonus1",
            Strategy::TwoBonus => "bonus2",
        }
    }
}

/// `counts[i]` traces of `Strategy::ALL[i]` on [`strategy_level`], player ids
/// `<tag>-<n>`, ordered by strategy.
pub fn strategy_corpus(counts: [usize; 4]) -> Vec<PlayTrace> {
    let level = strategy_level();
    Strategy::ALL
        .into_iter()
        .zip(counts)
        .flat_map(|(strategy, count)| {
            let level = &level;
            (0..count).map(move |n| {
                PlayTrace::replay(level, format!("{}-{n:03}", strategy.tag()), "s1", strategy.moves())
                    .expect("fixture moves are legal")
            })
        })
        .collect()
}
