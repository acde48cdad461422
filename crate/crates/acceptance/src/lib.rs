//! Test-only support: slow, obviously-correct reference implementations.

pub mod oracle;
