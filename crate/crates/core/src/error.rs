use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("effective oscillator frequency not positive (omega' = {0})")]
    NonPositiveOmegaPrime(f64),

    #[error("pump detuning must be nonzero")]
    ZeroDetuning,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency {omega} is within {guard} of the collective-mode pole at {omega_prime}")]
    PoleGuard {
        omega: f64,
        omega_prime: f64,
        guard: f64,
    },

    #[error("drift matrix is singular at omega = {omega} (condition number {condition:e})")]
    SingularDrift { omega: f64, condition: f64 },

    #[error("analytic approximation outside its domain: {0}")]
    ApproxDomain(String),

    #[error("Fock truncation unconverged: boundary tail mass {tail:e} exceeds {threshold:e}")]
    Unconverged { tail: f64, threshold: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
