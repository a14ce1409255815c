//! Experiment driver for `bmnet`: config loading, the subcommands, and the
//! CSV/JSON artifacts they write.

pub mod commands;
pub mod config;
pub mod output;

mod error;

pub use error::CliError;
