//! Command-line interface over the net-based decision library: evaluate
//! functions on the epsilon grid, compute norms and metrics, decide
//! memberships, run the built-in demos, and verify randomized property
//! suites with reproducible seeds.

pub mod commands;
pub mod config;
pub mod demos;
pub mod error;
pub mod input;
pub mod report;
pub mod verify;
