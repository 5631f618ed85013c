use thiserror::Error;

/// Errors surfaced by the physics and compilation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("radial instability: ion {ion} has radicand {radicand:.6e} <= 0 in the effective-frequency formula")]
    RadialInstability { ion: usize, radicand: f64 },

    #[error("unstable chain: coupling matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    Instability { min_eigenvalue: f64 },

    #[error("covariance matrix is singular or not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    SingularCovariance { min_eigenvalue: f64 },

    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("matrix is not symplectic (defect {defect:.3e} exceeds {tolerance:.1e})")]
    NotSymplectic { defect: f64, tolerance: f64 },

    #[error("invalid covariance matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bipartition: {0}")]
    InvalidPartition(String),

    #[error("{n} modes would require {count} bipartitions; pass explicit partition lists for n > {max}")]
    TooManyBipartitions { n: usize, count: u64, max: usize },

    #[error("synthesis failed: {0}")]
    Synthesis(String),

    #[error("schedule verification failed: deviation {deviation:.3e} exceeds tolerance {tolerance:.1e} (spectator leakage {leakage:.3e})")]
    Verification { deviation: f64, tolerance: f64, leakage: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("schedule format error on line {line}: {message}")]
    ScheduleFormat { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for config/usage problems, 3 for
    /// numerical or physics failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::ScheduleFormat { .. } | Error::Io(_) | Error::Serialize(_) => 2,
            _ => 3,
        }
    }
}
