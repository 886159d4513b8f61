use thiserror::Error;

/// Errors produced by the geometric algorithms and their oracles.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("degenerate projection direction (norm {norm:e})")]
    DegenerateDirection { norm: f64 },

    #[error("invalid lifting graph: {0}")]
    InvalidGraph(String),

    #[error("node index {index} out of range for a graph with {k} nodes")]
    NodeOutOfRange { index: usize, k: usize },

    #[error("invalid size specification: {0}")]
    InvalidSizes(String),

    #[error("cannot split {n} points into {k} parts")]
    TooManyParts { n: usize, k: usize },

    #[error("{k} does not divide {n}; use the nearly balanced partition instead")]
    NotDivisible { n: usize, k: usize },

    #[error("size spec exhausted: no class has remaining quota")]
    QuotaExhausted,

    #[error("invalid colorful instance: {0}")]
    InvalidColorInstance(String),

    #[error("too many sets for the ambient dimension: k = {k}, d = {d}")]
    TooManySets { k: usize, d: usize },

    #[error("parameter m = {m} out of range [2, {len}] for set {set}")]
    DepthParameterOutOfRange { set: usize, m: usize, len: usize },

    #[error("instance too large for oracle ({count} assignments, limit {limit})")]
    OracleTooLarge { count: f64, limit: f64 },

    #[error("hull distance did not converge; distance lies in [{lower:e}, {upper:e}]")]
    NonConvergence { lower: f64, upper: f64 },

    #[error("operation requires dimension 2, found {0}")]
    NotPlanar(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
