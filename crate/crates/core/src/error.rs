use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: |M - M^H|_F = {defect:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("matrix is not unitary: |U^H U - I|_F = {defect:.3e} exceeds {tolerance:.3e}")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error(
        "eigendecomposition did not converge (dim {dim}, |M|_F = {frobenius_norm:.3e}); \
         the matrix may contain non-finite entries or be badly scaled"
    )]
    EigenNonConvergence { dim: usize, frobenius_norm: f64 },

    #[error(
        "eigenvalue phase {phase:.6} is within {margin:.1e} of the branch cut at +/-pi; \
         reduce the time step"
    )]
    BranchCut { phase: f64, margin: f64 },

    #[error("<psi|H|psi> has imaginary part {imaginary:.3e} above bound {bound:.3e}")]
    ExpectationNotReal { imaginary: f64, bound: f64 },

    #[error("BCH order {order} is not supported (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },

    #[error("insufficient data: {usable} usable points, at least {required} required")]
    InsufficientData { usable: usize, required: usize },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
