use std::path::PathBuf;

use thiserror::Error;

/// Failures grouped by the stage that produced them; each maps to its own
/// exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("divergence: {0}")]
    Divergence(flaf_core::Error),

    #[error("run: {0}")]
    Run(flaf_core::Error),

    #[error("io: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Divergence(_) => 3,
            CliError::Run(_) => 4,
            CliError::Io { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<flaf_core::Error> for CliError {
    fn from(err: flaf_core::Error) -> Self {
        match err {
            flaf_core::Error::Config(msg) => CliError::Config(msg),
            err @ flaf_core::Error::Divergence { .. } => CliError::Divergence(err),
            other => CliError::Run(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
