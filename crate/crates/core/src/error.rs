use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix side must be even, got {0}")]
    OddDimension(usize),
    #[error("singular matrix: pivot {pivot:e} at or below tolerance {tol:e}")]
    SingularMatrix { pivot: f64, tol: f64 },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is not symplectic (residual {residual:e}, tolerance {tol:e})")]
    NotSymplectic { residual: f64, tol: f64 },
    #[error("upper-left block is singular (min singular value {min_singular_value:e})")]
    SingularUpperLeftBlock { min_singular_value: f64 },
    #[error("upper-left block is singular after the shift (min singular value {min_singular_value:e})")]
    SingularAfterShift { min_singular_value: f64 },
    #[error("shifted upper-left block is numerically singular (min singular value {min_singular_value:e}, tolerance {tol:e})")]
    NonsingularizationFailed { min_singular_value: f64, tol: f64 },
    #[error("no nonsingular symmetric intertwiner found after {draws} draws")]
    NonsingularSolutionNotFound { draws: usize },
    #[error("computed factor is not symmetric (asymmetry {asymmetry:e}, tolerance {tol:e})")]
    AsymmetricFactor { asymmetry: f64, tol: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("factor chain does not match the expected pattern: {0}")]
    ChainPattern(String),
}

impl Error {
    /// Variant name, used in command-line diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite => "NonFinite",
            Error::OddDimension(_) => "OddDimension",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NotSymplectic { .. } => "NotSymplectic",
            Error::SingularUpperLeftBlock { .. } => "SingularUpperLeftBlock",
            Error::SingularAfterShift { .. } => "SingularAfterShift",
            Error::NonsingularizationFailed { .. } => "NonsingularizationFailed",
            Error::NonsingularSolutionNotFound { .. } => "NonsingularSolutionNotFound",
            Error::AsymmetricFactor { .. } => "AsymmetricFactor",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::ChainPattern(_) => "ChainPattern",
        }
    }
}
