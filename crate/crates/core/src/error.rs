//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by the algebra layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element has a pole at q = 0")]
    NotRegularAtZero,
    #[error("series coefficient is not an integer")]
    NonIntegerSeries,
    #[error("height bound {bound} exceeded (needed {needed})")]
    HeightBoundExceeded { bound: usize, needed: usize },
    #[error("generator indices must differ")]
    EqualIndices,
    #[error("coordinate vector has a negative entry")]
    NegativeCoordinate,
    #[error("operation requires a finite-type Cartan datum")]
    UnsupportedType,
    #[error("invalid Cartan datum: {0}")]
    InvalidCartan(String),
    #[error("invalid reduced word: {0}")]
    InvalidReducedWord(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("transition coefficient is not integral: {0}")]
    NonIntegralTransition(String),
    #[error("transition polynomial is not antisymmetric: {0}")]
    NonAntisymmetric(String),
    #[error("triangularity violated: {0}")]
    Triangularity(String),
    #[error("input is not homogeneous")]
    InhomogeneousInput,
    #[error("input is not strongly homogeneous")]
    NotStronglyHomogeneous,
    #[error("element is not in the span of the basis block")]
    NotInSpan,
    #[error("star image does not match the target block")]
    SetMismatch,
    #[error("index {0} out of range for rank {1}")]
    IndexOutOfRange(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
