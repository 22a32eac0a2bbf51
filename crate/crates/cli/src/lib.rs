//! Command-line front end for `flaf-core`: config parsing, experiment
//! output files and the `flaf` subcommands.

pub mod bundled;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{execute, Cli};
pub use error::{CliError, Result};
