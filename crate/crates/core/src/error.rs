use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown user {0}")]
    UnknownUser(usize),
    #[error("unknown machine {0}")]
    UnknownMachine(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("128-bit overflow while computing {0}")]
    Overflow(&'static str),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("contract violation: {0}")]
    ContractViolation(&'static str),
    #[error("out of range: {0}")]
    Range(String),
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
