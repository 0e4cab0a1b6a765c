use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A single record of an input file could not be decoded.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sample must contain at least one value")]
    EmptySample,

    #[error("non-finite value {0} in sample")]
    NonFinite(f64),

    #[error("exact distribution requires a tie-free sample")]
    TiesPresent,

    #[error("no collision-free path from ({from_x:.2}, {from_y:.2}) to ({to_x:.2}, {to_y:.2})")]
    Unreachable {
        from_x: f64,
        from_y: f64,
        to_x: f64,
        to_y: f64,
    },

    #[error("ground truth does not cover decided day {0}")]
    DayMismatch(u32),

    #[error("unknown layout `{0}`")]
    UnknownLayout(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig(message.into())
    }
}
