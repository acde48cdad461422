//! Play-trace strategy analytics for Wuzzit Trouble.
//!
//! Traces are replayed into game states, deduplicated into ranked unique
//! sequences, aggregated into a state graph, compared pairwise by dynamic time
//! warping over a game-aware state metric, and laid out in 2D.

pub mod distance;
pub mod exec;
pub mod export;
pub mod fixtures;
pub mod game;
pub mod ingest;
pub mod layout;
pub mod query;
pub mod stategraph;
pub mod text;

pub use exec::Exec;
