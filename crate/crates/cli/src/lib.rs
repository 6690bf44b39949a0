//! Configuration, result files and subcommands of the `wflo` tool.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::{Common, Failure};
pub use config::{load_config, parse_config, ConfigError, RunConfig};
