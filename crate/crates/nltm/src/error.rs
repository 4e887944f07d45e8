use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model evaluation produced a non-finite value at x={x}, p={p}")]
    ModelEval { x: f64, p: f64 },

    #[error("grid mismatch: operands live on different momentum grids")]
    GridMismatch,

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("M22 block is numerically singular (smallest singular value {smin:.3e} < {threshold:.3e}); scattering problem is ill-posed")]
    KernelNontrivial { smin: f64, threshold: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Linalg(#[from] ndarray_linalg::error::LinalgError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
