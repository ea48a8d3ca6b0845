//! Drivers behind the `toa` binary: configuration ingestion, the arrival and
//! minimum-uncertainty experiments, and their CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{figure2_config, run_arrival, FIGURE2_PRESET};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
