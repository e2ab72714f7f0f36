use thiserror::Error;

use crate::basis::Representation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LadderError {
    #[error("ladder length {length} outside supported range 1..={max}")]
    DimensionOverflow { length: usize, max: usize },

    #[error("expected a {expected:?} basis, got {found:?}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("amplitude ordering requires ground-state amplitudes")]
    MissingAmplitudes,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("cannot restrict to an empty index set")]
    EmptyRestriction,

    #[error("restriction indices must be strictly increasing and in range")]
    InvalidRestriction,

    #[error("rung coupling J_t must be nonzero")]
    ZeroRungCoupling,

    #[error("quadratic equation is degenerate (a, b, c all vanish)")]
    DegenerateEquation,

    #[error("deviation undefined for a zero reference energy")]
    UndefinedDeviation,

    #[error("amplitudes not normalized: sum of squares = {norm_sq}")]
    Unnormalized { norm_sq: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("requested {requested} eigenpairs from a {dim}-dimensional problem")]
    TooManyPairs { requested: usize, dim: usize },

    #[error("invalid solver setting: {0}")]
    InvalidSetting(String),

    #[error(
        "Lanczos did not converge after {iterations} iterations (best residuals {residuals:?})"
    )]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error(transparent)]
    Ladder(#[from] LadderError),
}
