use thiserror::Error;

/// Errors raised by the simulation and graph routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation requires dimension 2, got {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid erasure interval [{m}, {n}): {reason}")]
    InvalidInterval { m: usize, n: usize, reason: String },

    #[error("path of length {len} exceeds the exhaustive-closure limit of {limit}")]
    ScaleLimit { len: usize, limit: usize },

    #[error("cylinder construction failed: {0}")]
    Construction(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid vertex {0}: {1}")]
    InvalidVertex(usize, String),

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
