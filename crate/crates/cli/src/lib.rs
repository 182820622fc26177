//! Command-line front end for the `domewave` simulator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod units;

pub use commands::{run, Cli, CliError};
pub use config::{parse_config, parse_config_str, Config, ConfigError};
