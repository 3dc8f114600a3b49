use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not antisymmetric (defect {defect:e})")]
    NotSkew { defect: f64 },

    #[error("unknown catalog space `{0}`")]
    UnknownSpace(String),

    #[error("point lies outside the chart domain (distance {distance:.4} from center, radius {radius:.4})")]
    OutsideChart { distance: f64, radius: f64 },

    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("step of length {length:.4} exceeds the injectivity floor {floor:.4}")]
    StepTooLarge { length: f64, floor: f64 },

    #[error("bridge drift unavailable: kernel value {value:e} below floor at t = {t:e}; shrink T")]
    KernelFloor { value: f64, t: f64 },

    #[error("{0} is not supported on {1}")]
    Unsupported(&'static str, String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("estimate rejected: {invalid} of {total} paths invalid")]
    TooManyInvalidPaths { invalid: usize, total: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
