use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument `{field}`: {message}")]
    Argument { field: &'static str, message: String },

    /// An exact computation would exceed its enumeration budget.
    #[error("{what}: requested {measured} exceeds budget {budget}")]
    Budget {
        what: &'static str,
        measured: usize,
        budget: usize,
    },

    /// Not enough data to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An internal invariant was broken. Indicates a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn arg(field: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            field,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
