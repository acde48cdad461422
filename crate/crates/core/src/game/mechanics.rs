use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::level::{ItemId, Level};
use super::state::GameState;

/// Clockwise advances the marker to higher peg indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "cw")]
    Clockwise,
    #[serde(rename = "ccw")]
    CounterClockwise,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Clockwise, Direction::CounterClockwise];

    pub fn short(self) -> &'static str {
        match self {
            Direction::Clockwise => "cw",
            Direction::CounterClockwise => "ccw",
        }
    }

    pub fn long(self) -> &'static str {
        match self {
            Direction::Clockwise => "clockwise",
            Direction::CounterClockwise => "counter-clockwise",
        }
    }
}

/// One player move: turn cog `cog` (index into the level's cogs) `turns` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MoveAction {
    pub cog: usize,
    #[serde(rename = "dir")]
    pub direction: Direction,
    pub turns: u32,
}

impl MoveAction {
    pub fn new(cog: usize, direction: Direction, turns: u32) -> MoveAction {
        MoveAction { cog, direction, turns }
    }

    pub fn cw(cog: usize, turns: u32) -> MoveAction {
        MoveAction::new(cog, Direction::Clockwise, turns)
    }

    pub fn ccw(cog: usize, turns: u32) -> MoveAction {
        MoveAction::new(cog, Direction::CounterClockwise, turns)
    }
}

/// Canonical label, e.g. `c2:ccw:5`.
impl fmt::Display for MoveAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}:{}:{}", self.cog, self.direction.short(), self.turns)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("not a move label: {0:?}")]
pub struct ParseMoveError(String);

impl FromStr for MoveAction {
    type Err = ParseMoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMoveError(s.to_string());
        let mut parts = s.split(':');
        let cog = parts
            .next()
            .and_then(|c| c.strip_prefix('c'))
            .and_then(|c| c.parse().ok())
            .ok_or_else(err)?;
        let direction = match parts.next() {
            Some("cw") => Direction::Clockwise,
            Some("ccw") => Direction::CounterClockwise,
            _ => return Err(err()),
        };
        let turns = parts.next().and_then(|t| t.parse().ok()).ok_or_else(err)?;
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(MoveAction { cog, direction, turns })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("cog index {cog} out of range (level has {available} cogs)")]
    UnknownCog { cog: usize, available: usize },
    #[error("turn count {turns} outside [1, {max}]")]
    TurnsOutOfRange { turns: u32, max: u32 },
    #[error("state {0} is not valid for this level")]
    InvalidState(GameState),
}

impl Level {
    pub fn check_move(&self, action: &MoveAction) -> Result<(), MoveError> {
        if action.cog >= self.cogs().len() {
            return Err(MoveError::UnknownCog { cog: action.cog, available: self.cogs().len() });
        }
        if action.turns == 0 || action.turns > self.max_turns() {
            return Err(MoveError::TurnsOutOfRange { turns: action.turns, max: self.max_turns() });
        }
        Ok(())
    }

    /// Applies a move, collecting any uncollected item the marker stops on after each
    /// single cog rotation. Returns the new state and the items picked up, in stop order.
    pub fn apply_move(
        &self,
        state: &GameState,
        action: &MoveAction,
    ) -> Result<(GameState, Vec<ItemId>), MoveError> {
        self.check_move(action)?;
        if !self.is_valid_state(state) {
            return Err(MoveError::InvalidState(*state));
        }
        let mut picked = Vec::new();
        let next = self.step_with(state, action, |bit| picked.push(self.items()[bit]));
        Ok((next, picked))
    }

    /// Successor without validation; `action` must satisfy [`Level::check_move`].
    pub(crate) fn step(&self, state: &GameState, action: &MoveAction) -> GameState {
        self.step_with(state, action, |_| {})
    }

    fn step_with(
        &self,
        state: &GameState,
        action: &MoveAction,
        mut on_pick: impl FnMut(usize),
    ) -> GameState {
        let wheel = u64::from(self.wheel_size());
        let teeth = u64::from(self.cogs()[action.cog]) % wheel;
        let delta = match action.direction {
            Direction::Clockwise => teeth,
            Direction::CounterClockwise => (wheel - teeth) % wheel,
        };
        let mut marker = u64::from(state.marker);
        let mut collected = state.collected;
        for _ in 0..action.turns {
            marker = (marker + delta) % wheel;
            if let Some(bit) = self.item_at(marker as u32) {
                if !collected.contains(bit) {
                    collected = collected.with(bit);
                    on_pick(bit);
                }
            }
        }
        GameState::new(marker as u32, collected)
    }

    /// Every legal move, ordered by (cog, direction, turns).
    pub fn enumerate_moves(&self) -> Vec<MoveAction> {
        let mut moves = Vec::with_capacity(self.cogs().len() * 2 * self.max_turns() as usize);
        for cog in 0..self.cogs().len() {
            for direction in Direction::ALL {
                for turns in 1..=self.max_turns() {
                    moves.push(MoveAction { cog, direction, turns });
                }
            }
        }
        moves
    }

    /// All keys collected; marker position and bonuses do not matter.
    pub fn is_end_state(&self, state: &GameState) -> bool {
        self.key_mask().is_subset(state.collected)
    }

    pub fn score(&self, state: &GameState) -> i64 {
        state.collected.iter().map(|bit| self.item_points(bit)).sum()
    }

    /// Replays `moves` from the initial state; returns every visited state
    /// (length `moves.len() + 1`).
    pub fn replay(&self, moves: &[MoveAction]) -> Result<Vec<GameState>, MoveError> {
        let mut states = Vec::with_capacity(moves.len() + 1);
        let mut current = self.initial_state();
        states.push(current);
        for action in moves {
            self.check_move(action)?;
            current = self.step(&current, action);
            states.push(current);
        }
        Ok(states)
    }
}
