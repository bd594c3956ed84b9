use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix determinant deviates from 1 by more than {0:.3e}")]
    DegenerateMatrix(f64),
    #[error("fundamental-domain reduction did not converge after {0} steps")]
    NonConvergence(usize),
    #[error("invalid interval: a = {a} > b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("operation requires compact support; window is a Gaussian/Hermite variant")]
    UnboundedSupport,
    #[error("window is not piecewise C^1: derivative order {q} would produce delta terms")]
    NotSmoothEnough { q: u32 },
    #[error("adaptive quadrature failed to certify tolerance {tol:.3e} (best error {err:.3e})")]
    QuadratureFailure { tol: f64, err: f64 },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("point lies outside the fundamental domain")]
    OutsideFundamentalDomain,
    #[error("theta series converges too slowly at y = {y:.3e}; reduce to the fundamental domain first")]
    SlowConvergence { y: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
