use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series too short: need {needed} samples, have {have}")]
    SeriesTooShort { needed: usize, have: usize },
    #[error("too few points: need {needed}, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("overlapping vertex id ranges")]
    OverlappingIds,
    #[error("region out of range: center ({col}, {row}), radius {radius}")]
    RegionOutOfRange { col: usize, row: usize, radius: usize },
    #[error("invalid range [{start}, {end}] for module of length {len}")]
    InvalidRange { start: usize, end: usize, len: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
