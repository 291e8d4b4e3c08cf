use thiserror::Error;

/// Errors produced by the averaging, indicator and ingestion routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("value at position {index} is not finite")]
    NonFinite { index: usize },

    #[error("close at position {index} is negative ({value})")]
    NegativeClose { index: usize, value: f64 },

    #[error("weight α_{index} = {value} lies outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },

    #[error("explicit schedule has {available} weights but α_{index} was requested")]
    ScheduleExhausted { index: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window of length {window} ending at {end} does not fit a series of length {len}")]
    WindowOutOfRange { end: usize, window: usize, len: usize },

    #[error("series of length {len} is too short for length {required}")]
    SeriesTooShort { len: usize, required: usize },

    #[error("limit average is zero; relative criteria are undefined")]
    ZeroAverage,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
