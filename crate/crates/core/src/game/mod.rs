//! Wuzzit Trouble wheel-and-cog mechanics.
//!
//! A level is a wheel of pegs carrying keys and bonus items. Turning a cog with
//! `t` teeth once rotates the wheel by `t` pegs; a move turns one cog up to
//! `max_turns_per_move` times, and every single rotation is a stop where an
//! item under the marker is picked up.

mod events;
mod level;
mod mechanics;
pub mod search;
mod state;
mod synth;
mod trace;

pub use events::{derive_events, Collection, TraceEventKind};
pub use level::{ItemClass, ItemId, Level, LevelConfig, LevelError, ParseItemError, MAX_ITEMS};
pub use mechanics::{Direction, MoveAction, MoveError, ParseMoveError};
pub use state::{GameState, ItemSet};
pub use synth::{generate_synthetic_traces, Policy, SynthError};
pub use trace::{trace_id, LogRecord, PlayTrace};
