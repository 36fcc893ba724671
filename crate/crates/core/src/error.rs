use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid size must be at least 1")]
    EmptyGrid,

    #[error("grid of {grid} samples exceeds the limit of {limit} for this operation")]
    GridTooLarge { grid: usize, limit: usize },

    #[error("grid of {actual} samples cannot resolve P_{index}; need more than {required}")]
    InsufficientGrid { index: usize, required: u128, actual: usize },

    #[error("grid of {grid} samples is not divisible by 3^{scale}")]
    MisalignedGrid { grid: usize, scale: u32 },

    #[error("grid mismatch: expected {expected} samples, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error(
        "no index N <= {n_max} reaches ||P_N||_{{{p}}} >= {threshold} at level n={level} \
         (best norm {best_norm:.6}); {hint}"
    )]
    NotFound { level: usize, n_max: usize, p: f64, threshold: f64, best_norm: f64, hint: String },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("cumulative integral is not strictly increasing at index {index}")]
    NonIncreasing { index: usize },

    #[error("cumulative length stalls at index {index}; the weight vanishes on a cell")]
    NonMonotonic { index: usize },

    #[error("hypothesis not met: ||f||_p = {norm:.6} < 2 after normalisation")]
    HypothesisNotMet { norm: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
