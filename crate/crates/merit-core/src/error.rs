//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's contract (dimension mismatch, empty
    /// input, out-of-range parameter).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input data fails the simplex feasibility requirements (column sums,
    /// negative entries). Distinct from `Parse`: the file was well-formed,
    /// the matrix it encodes is unusable.
    #[error("infeasible input: {0}")]
    Infeasible(String),

    /// A gradient evaluation produced NaN or ±inf; the offending column is
    /// named so the caller can trace the data.
    #[error("non-finite gradient in column {column}")]
    NonFiniteGradient { column: usize },

    /// Malformed text input. `line` and `col` are 1-based positions in the
    /// source, suitable for user-facing diagnostics.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, col, msg: msg.into() }
    }
}
