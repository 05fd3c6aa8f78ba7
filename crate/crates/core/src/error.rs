use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation n_max must be at least 1")]
    InvalidTruncation,

    #[error("truncation insufficient at n_max={n_max}: {reason}")]
    TruncationInsufficient { n_max: usize, reason: String },

    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("model is not at resonance (omega0={omega0}, omega_a={omega_a})")]
    NotAtResonance { omega0: f64, omega_a: f64 },

    #[error("closed form requires {0}")]
    OutsideFormulaDomain(&'static str),

    #[error("Mandel Q undefined for a mode with zero mean occupation")]
    UndefinedForVacuum,

    #[error("moment map requires the atomic mode to start in vacuum")]
    NonVacuumInput,

    #[error("tridiagonal eigensolver did not converge")]
    NoConvergence,

    #[error("evolution times must be finite, nonnegative and sorted")]
    InvalidTimes,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}
