use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: correction {correction:e} exceeds {tolerance:e}")]
    NotHermitian { correction: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge on a {dim}x{dim} matrix after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence {
        dim: usize,
        sweeps: usize,
        off_norm: f64,
    },

    #[error("{what} = {value} exceeds the enumeration cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("expected {expected} direction matrices, got {found}")]
    DirectionCount { expected: usize, found: usize },

    #[error("exponential overflow: |t|*||x|| = {scale:e} exceeds {limit:e}")]
    Overflow { scale: f64, limit: f64 },

    #[error("function `{kind}` supports derivatives up to order {max_order}, order {requested} requested")]
    InsufficientOrder {
        kind: String,
        max_order: usize,
        requested: usize,
    },

    #[error("||x|| = {norm} is outside the admissible radius {radius}")]
    OutsideRadius { norm: f64, radius: f64 },

    #[error("finite-difference stencil point has norm {norm}, outside the validity ball of radius {radius}")]
    StencilOutsideBall { norm: f64, radius: f64 },

    #[error("Fourier tail mass {tail:e} above tolerance {tolerance:e} at s_max = {s_max}")]
    FourierTail {
        tail: f64,
        tolerance: f64,
        s_max: f64,
    },

    #[error("invalid argument `{field}`: {reason}")]
    InvalidArgument { field: String, reason: String },

    #[error("parse error in `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
