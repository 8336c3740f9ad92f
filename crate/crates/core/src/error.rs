use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distribution has no intervals")]
    Empty,
    #[error("weight {index} is negative: {value}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight {index} is not finite: {value}")]
    NonFiniteWeight { index: usize, value: f64 },
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("cumulative bounds are not strictly increasing at interval {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("{n} intervals do not fit a 31-bit node reference")]
    TooLarge { n: usize },
    #[error("guide table needs at least one cell")]
    ZeroCells,
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("load trace is empty")]
    EmptyTrace,
    #[error("group size {group} is invalid for a trace of {len} samples")]
    InvalidGroupSize { group: usize, len: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("density has no positive value")]
    AllZeroDensity,
    #[error("density dimensions {width}x{height} do not match {len} values")]
    DimensionMismatch { width: usize, height: usize, len: usize },
    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
