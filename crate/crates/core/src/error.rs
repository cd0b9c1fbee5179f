use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad vertex ids, bad sets, bad files).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("regex syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    /// An operation was called outside its hypotheses (e.g. a nonnegative
    /// matrix was required).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("nilpotent: all walks die out")]
    Nilpotent,

    #[error("singular matrix: {0}")]
    Singular(String),

    /// Numerical procedure failed to converge or produced inconsistent
    /// results for the configured tolerances.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
