use thiserror::Error;

/// Errors produced by the LJL library.
#[derive(Debug, Error)]
pub enum LjlError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("operation needs at least {needed} points, cloud has {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("neighbor count k={k} invalid for {n} points (need 1 <= k <= n-1)")]
    NeighborCount { k: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("normal {index} is not unit length (norm {norm})")]
    NonUnitNormal { index: usize, norm: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid refine window T={total}, SS={start}, T'={end}: need 1 <= SS <= T' <= T")]
    InvalidWindow { total: usize, start: usize, end: usize },
    #[error("adaptive step size is undefined at iteration 0")]
    ZeroIteration,
    #[error("baseline {0} is zero; relative increment undefined")]
    ZeroBaseline(&'static str),
    #[error("no point has a qualifying neighbor")]
    NoQualifiedNeighbor,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LjlError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> LjlError {
    LjlError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
