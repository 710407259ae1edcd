use thiserror::Error;

/// Errors produced by geometry, valuation, and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,

    #[error("point {index} has {found} coordinates, expected {expected}")]
    CoordinateMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("unsupported dimension {0} (supported: {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("body is not full-dimensional (intrinsic dimension {intrinsic} in R^{dim})")]
    LowerDimensional { dim: usize, intrinsic: usize },

    #[error("body is empty")]
    EmptyBody,

    #[error("frame is not orthonormal (deviation {0:e})")]
    NonOrthonormalFrame(f64),

    #[error("matrix is not orthogonal (deviation {0:e})")]
    NonOrthogonal(f64),

    #[error("psi valuations are only defined in the plane, got dimension {0}")]
    PsiDimension(usize),

    #[error("negative parallel-body radius {0}")]
    NegativeRadius(f64),

    #[error("fit residual {residual:e} exceeds threshold {threshold:e}: {context}")]
    ResidualTooLarge {
        residual: f64,
        threshold: f64,
        context: String,
    },

    #[error("rank-deficient design ({rows}x{cols}, singular value ratio {ratio:e})")]
    RankDeficient { rows: usize, cols: usize, ratio: f64 },

    #[error("not enough samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
