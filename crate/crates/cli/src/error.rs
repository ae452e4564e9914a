use std::path::PathBuf;

use thiserror::Error;

/// Failures of the experiment runner, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    /// Malformed document: syntax, unknown fields, wrong types.
    #[error("parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    /// Well-formed but unusable configuration.
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("experiment failed: {0}")]
    Runtime(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Parse { .. } => 2,
            Self::Validation(_) => 3,
            Self::Runtime(_) | Self::Write { .. } => 4,
        }
    }
}

pub(crate) fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

pub(crate) fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}
