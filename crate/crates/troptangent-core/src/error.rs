//! Error type shared across the library.

use thiserror::Error;

/// Library error. `Hypothesis`-class errors indicate that the input
/// fails a mathematical hypothesis of the method (CLI exit code 2);
/// everything else is an ordinary error (exit code 1).
#[derive(Debug, Error, Clone)]
pub enum Error {
    /// Malformed input data (shape mismatches, invalid vectors, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Degenerate data where nondegenerate data is required.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Failure of a mathematical hypothesis of the method.
    #[error("hypothesis failure: {message}")]
    Hypothesis {
        /// Human-readable description quoting the violated hypothesis.
        message: String,
        /// The cell (if any) where the violation was detected.
        cell: Option<String>,
    },

    /// Input file / JSON parsing problem.
    #[error("parse error: {0}")]
    Parse(String),

    /// A weighted complex violates the balancing condition.
    #[error("unbalanced complex: {0}")]
    Unbalanced(String),

    /// Internal consistency check failed (e.g. a facet walk that does
    /// not close up).
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    /// A specialized shortcut was requested on a cell outside its scope.
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

impl Error {
    pub(crate) fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis { message: msg.into(), cell: None }
    }

    pub(crate) fn hypothesis_at(msg: impl Into<String>, cell: impl Into<String>) -> Self {
        Error::Hypothesis { message: msg.into(), cell: Some(cell.into()) }
    }

    pub(crate) fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }

    pub(crate) fn not_applicable(msg: impl Into<String>) -> Self {
        Error::NotApplicable(msg.into())
    }

    /// Short machine-readable code for serialization.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Degenerate(_) => "degenerate",
            Error::Hypothesis { .. } => "hypothesis",
            Error::Parse(_) => "parse",
            Error::Unbalanced(_) => "unbalanced",
            Error::Inconsistency(_) => "inconsistency",
            Error::NotApplicable(_) => "not-applicable",
        }
    }

    /// The cell name attached to the error, if any.
    pub fn cell(&self) -> Option<&str> {
        match self {
            Error::Hypothesis { cell, .. } => cell.as_deref(),
            _ => None,
        }
    }

    /// Whether this is a hypothesis failure (CLI exit code 2).
    pub fn is_hypothesis(&self) -> bool {
        matches!(self, Error::Hypothesis { .. })
    }
}
