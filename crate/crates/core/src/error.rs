use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid model specification: {0}")]
    Spec(String),

    #[error("operator is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("step size underflow at t = {time} (h = {step:.3e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {time}")]
    TooManySteps { max_steps: usize, time: f64 },

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("Fock truncation did not converge below {tol:e} up to n_f = {cap}")]
    TruncationNotConverged { tol: f64, cap: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("missing input: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
