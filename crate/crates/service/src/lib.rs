//! Precomputed play-trace datasets and the HTTP service that serves them.

pub mod dataset;
pub mod server;
pub mod sessions;

pub use dataset::{precompute, Dataset, DatasetError, PrecomputeOptions};
pub use server::{app_state, router, serve, AppState, SESSION_HEADER};
