use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A 2×2 complex matrix is not the image of a quaternion.
    #[error("matrix is not quaternion-shaped: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Shape { residual: f64, tol: f64 },

    #[error("block cannot be decomposed into the Type-II off-diagonal pattern: {0}")]
    Decomposition(String),

    #[error("{what} is numerically singular (smallest singular value {sigma_min:.3e} < {threshold:.3e})")]
    Singular {
        what: &'static str,
        sigma_min: f64,
        threshold: f64,
    },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("eigenvalues do not pair up: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Pairing { residual: f64, tol: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("invalid ensemble parameters: {0}")]
    Spec(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
