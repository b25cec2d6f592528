//! Experiment driver around the `fareycount` counting engine: run
//! configuration, subcommand dispatch, JSON-lines results with a cache,
//! scaling fits and bundled verification suites.

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod record;
pub mod scaling;
pub mod suites;

pub use error::{HarnessError, Result};
