//! Command handlers behind the `panelfactor` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_analyze, cmd_simulate, cmd_validate, run_analysis, Analysis, Failure};
pub use config::{RunConfig, SimConfig};
pub use output::Format;
