//! File formats, configuration and commands behind the `dmg` binary.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod fields;
pub mod mtx;

pub use error::{exit, CliError, CliResult};
