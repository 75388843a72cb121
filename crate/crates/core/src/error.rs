use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChuaError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite state component")]
    NonFiniteState,

    /// The model left the representable range (sinh/cosh/exp overflow or
    /// the divergence radius was crossed).
    #[error("diverged at t = {t}")]
    Diverged { t: f64 },

    #[error("pole of G(s) on the imaginary axis at omega = {omega}")]
    PoleOnAxis { omega: f64 },

    /// N(X) = 0, so the locus -1/N(X) jumps through infinity.
    #[error("describing function vanishes at X = {amplitude}")]
    LocusDiscontinuity { amplitude: f64 },

    #[error("adaptive step underflow at t = {t} (state {state:?})")]
    StepUnderflow { t: f64, state: [f64; 3] },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = ChuaError> = std::result::Result<T, E>;
