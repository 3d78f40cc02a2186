use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("non-finite value in observation {index}")]
    NonFiniteInput { index: usize },

    #[error("group range [{lo}, {hi}) out of range for {groups} tie groups")]
    IndexOutOfRange { lo: usize, hi: usize, groups: usize },

    #[error("sigma_min must be finite and positive, got {0}")]
    InvalidSigmaMin(f64),

    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("no observations in contact set [{lo}, {hi}]")]
    EmptyContactSet { lo: f64, hi: f64 },

    #[error("invalid contact set: {0}")]
    InvalidContactSet(String),

    #[error("scale c = {c} has log(c) <= 1; decrease sigma_min")]
    ScaleTooSmall { c: f64 },

    #[error("invalid truncation schedule: {0}")]
    InvalidSchedule(String),

    #[error("coordinate {index} does not share the covariate of coordinate 0")]
    MismatchedCovariates { index: usize },

    #[error("invalid data generating process: {0}")]
    InvalidSpec(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}
