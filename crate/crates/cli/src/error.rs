use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Numerical(#[from] semirad_core::Error),
}

impl CliError {
    /// Process exit status: 2 for usage, configuration and I/O problems
    /// (including bad check parameters), 3 for numerical precondition
    /// violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(semirad_core::Error::BadParameter(_)) => 2,
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
