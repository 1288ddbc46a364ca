use thiserror::Error;

use crate::slot::SlotOutcome;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A block outcome that the symbol matrix cannot produce.
    #[error("protocol violation: outcome {outcome:?} is unreachable for a {types}-type matrix")]
    ProtocolViolation {
        outcome: Vec<SlotOutcome>,
        types: usize,
    },

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
