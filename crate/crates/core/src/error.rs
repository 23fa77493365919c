use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty series")]
    EmptySeries,

    /// `index` is 1-based, matching the line/vertex numbering users see.
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid delta {0}: must be a non-negative number")]
    InvalidDelta(f64),

    #[error("curve parameter {t} outside [1, {n}]")]
    ParamOutOfRange { t: f64, n: usize },

    #[error("malformed signature indices: {0}")]
    MalformedIndices(String),

    #[error("rank {k} outside 1..={total}")]
    RankOutOfRange { k: u64, total: u64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_nan() || delta < 0.0 {
        Err(Error::InvalidDelta(delta))
    } else {
        Ok(())
    }
}
