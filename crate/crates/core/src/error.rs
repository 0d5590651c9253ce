use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MemsError {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    /// The gap `1 + u` fell below the touchdown threshold.
    #[error("touchdown: minimal gap {min_gap:.6e} below threshold {threshold:.6e} at x = {x:.6}")]
    Touchdown { min_gap: f64, threshold: f64, x: f64 },

    /// The state left `S_alpha(kappa/2)` through its norm bound.
    #[error("norm guard tripped: ||u||_(1+alpha) = {norm:.6e} exceeds {bound:.6e}")]
    NormGuard { norm: f64, bound: f64 },

    #[error("admissibility error: {0}")]
    Admissibility(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("config error (line {line}, key `{key}`): {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MemsError {
    fn from(e: std::io::Error) -> Self {
        MemsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MemsError>;
