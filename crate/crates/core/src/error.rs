use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation n_max must be at least 1, got {0}")]
    InvalidTruncation(usize),

    #[error("Fock level {n} outside truncation n_max={n_max}")]
    FockLevelOutOfRange { n: usize, n_max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("drive evaluated at t={t} outside its sampled domain [{start}, {end}]")]
    DriveOutOfDomain { t: f64, start: f64, end: f64 },

    #[error("quadrature did not reach tolerance {tol:e} on [{a}, {b}] (estimate {estimate:e})")]
    QuadratureNonConvergence { a: f64, b: f64, tol: f64, estimate: f64 },

    #[error("beta = gamma + i chi vanishes; the coherence block needs no prefactor")]
    VanishingBeta,

    #[error("overflow guard: gamma*t*n_max = {scale:.1} exceeds {limit}; use the oracle integrator instead")]
    OverflowGuard { scale: f64, limit: f64 },

    #[error("integrator produced a non-finite value at t={t}")]
    NonFinite { t: f64 },

    #[error("dense Liouvillian limited to n_max <= {limit}, got {n_max}")]
    LiouvillianTooLarge { n_max: usize, limit: usize },

    #[error("state invariant `{invariant}` violated: residual {magnitude:e}")]
    InvariantViolation { invariant: &'static str, magnitude: f64 },
}
