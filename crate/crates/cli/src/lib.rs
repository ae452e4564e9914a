//! Config-driven runner for ergotropy experiments: parses experiment
//! documents, dispatches to `ergolab-core` and writes result files.

pub mod config;
pub mod error;
pub mod fixtures;
pub mod output;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::CliError;
