//! Error type shared across the workspace.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition of an operation was broken by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// CSV or numeric parse failure; `row` and `col` are 1-based.
    #[error("parse error at row {row}, column {col}: {reason}")]
    Parse {
        row: usize,
        col: usize,
        reason: String,
    },

    /// Exhaustive search would exceed the enumeration budget.
    #[error(
        "instance too large for exhaustive search: {bound:.3e} candidate \
         solutions exceed the {limit:.3e} budget"
    )]
    TooLarge { bound: f64, limit: f64 },

    /// Bracketed root finding failed; surfaced, never swallowed.
    #[error("root finder: {0}")]
    RootFind(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
