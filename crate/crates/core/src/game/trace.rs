use serde::{Deserialize, Serialize};

use super::level::Level;
use super::mechanics::{MoveAction, MoveError};
use super::state::GameState;

/// One play session of one level, with its states derived by replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayTrace {
    pub trace_id: String,
    pub player_id: String,
    pub session_id: String,
    pub level_id: String,
    pub moves: Vec<MoveAction>,
    pub states: Vec<GameState>,
    pub completed: bool,
}

impl PlayTrace {
    pub fn replay(
        level: &Level,
        player_id: impl Into<String>,
        session_id: impl Into<String>,
        moves: Vec<MoveAction>,
    ) -> Result<PlayTrace, MoveError> {
        let player_id = player_id.into();
        let session_id = session_id.into();
        let states = level.replay(&moves)?;
        let completed = states.last().is_some_and(|s| level.is_end_state(s));
        Ok(PlayTrace {
            trace_id: trace_id(&player_id, &session_id, level.id()),
            player_id,
            session_id,
            level_id: level.id().to_string(),
            moves,
            states,
            completed,
        })
    }
}

/// Trace identity: one trace per (player, session, level).
pub fn trace_id(player_id: &str, session_id: &str, level_id: &str) -> String {
    format!("{player_id}/{session_id}/{level_id}")
}

/// One line of the trace log format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub player_id: String,
    pub session_id: String,
    pub level_id: String,
    pub seq_no: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ts: Option<i64>,
    #[serde(rename = "move")]
    pub action: MoveAction,
    /// Completion flag as recorded by the client; present on the last event of a session.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completed: Option<bool>,
}

impl PlayTrace {
    /// Log lines for this trace; the final line carries the completion flag.
    pub fn to_records(&self, base_ts: i64) -> Vec<LogRecord> {
        let last = self.moves.len().saturating_sub(1);
        self.moves
            .iter()
            .enumerate()
            .map(|(i, action)| LogRecord {
                player_id: self.player_id.clone(),
                session_id: self.session_id.clone(),
                level_id: self.level_id.clone(),
                seq_no: i as u64,
                ts: Some(base_ts + 1_000 * i as i64),
                action: *action,
                completed: (i == last).then_some(self.completed),
            })
            .collect()
    }
}
