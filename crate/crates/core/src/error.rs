use thiserror::Error;

/// Errors raised by the numerical and semi-Hilbertian layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains NaN or infinite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (lambda_min = {min:.3e}, lambda_max = {max:.3e})")]
    NotPsd { min: f64, max: f64 },
    #[error("the positive operator A must be non-zero")]
    ZeroOperator,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operator does not admit an A-adjoint (range residual {0:.3e})")]
    NoAAdjoint(f64),
    #[error("operator is not A-bounded (kernel residual {0:.3e})")]
    NotABounded(f64),
    #[error("vector has vanishing A-seminorm")]
    DegenerateVector,
    #[error("operator is not A-selfadjoint (residual {0:.3e})")]
    NotASelfadjoint(f64),
    #[error("bad parameter: {0}")]
    BadParameter(&'static str),
    #[error("matrix data length {len} does not match {rows}x{cols}")]
    ShapeData { rows: usize, cols: usize, len: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
