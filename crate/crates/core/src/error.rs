use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Numerical failures (pole proximity, truncation, non-convergence) are kept
/// distinct from input errors so that front ends can map them to different
/// exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DtnError {
    #[error("zero search for order {order}, index {index} did not converge after {iterations} iterations")]
    ZeroNotConverged {
        order: f64,
        index: usize,
        iterations: usize,
    },

    #[error("z = {z} lies within {radius:e} of the pole at E = {pole}")]
    PoleProximity { z: f64, pole: f64, radius: f64 },

    #[error("series tail bound {bound:e} exceeds tolerance {tolerance:e} at truncation level {level}")]
    Truncation {
        level: usize,
        bound: f64,
        tolerance: f64,
    },

    #[error("tail bound unavailable: {0}")]
    BoundUnavailable(String),

    #[error("quadrature resolution {resolution} cannot resolve mode index {mode}")]
    Resolution { resolution: usize, mode: usize },

    #[error("domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: String, found: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("no sign change in bracket [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },
}

impl DtnError {
    /// True for errors produced by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            DtnError::InvalidArgument(_) | DtnError::DomainMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, DtnError>;
