//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by any fedproto operation.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates an operation's contract.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data violates a domain invariant (range, shape, schema).
    #[error("data error: {0}")]
    Data(String),

    /// A parse failure locatable to a line of an input file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
