use thiserror::Error;

use crate::filters::Algorithm;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input sample that cannot be fed to the signal path.
    #[error("non-finite input sample {value}")]
    Domain { value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A weight went non-finite after an update, which almost always means the
    /// step size is too large for the input power.
    #[error("{algorithm} diverged at iteration {iteration}{}", run.map(|r| format!(" of run {r}")).unwrap_or_default())]
    Divergence {
        algorithm: Algorithm,
        run: Option<u64>,
        iteration: u64,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
