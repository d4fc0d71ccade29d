use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Numeric(#[from] ftr_noma::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("write failed: {0}")]
    Write(#[source] std::io::Error),

    #[error("malformed table: {0}")]
    Format(String),

    #[error("plot: {0}")]
    Plot(String),

    #[error("{failed} of {total} validation checks failed")]
    Acceptance { failed: usize, total: usize },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn write(source: std::io::Error) -> Self {
        CliError::Write(source)
    }

    pub(crate) fn csv(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }

    /// 0 success, 1 configuration or I/O, 2 numerical failure, 3 failed validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Write(_) => 1,
            CliError::Numeric(_) | CliError::Format(_) | CliError::Plot(_) => 2,
            CliError::Acceptance { .. } => 3,
        }
    }
}
