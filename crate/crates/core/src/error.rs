use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("number field mismatch between operands")]
    FieldMismatch,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("direction is not unit-norm (HS norm {0})")]
    NotUnitNorm(f64),

    #[error("direction is not traceless (trace {0})")]
    NotTraceless(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPositive(f64),

    #[error("Hermitian eigensolver did not converge (dim {dim}, max {max_iter} iterations, HS norm {norm})")]
    EigenNonConvergence { dim: usize, max_iter: usize, norm: f64 },

    #[error("non-generic direction: eigenvalue gap {gap:e} at the binding constraint")]
    NonGeneric { gap: f64 },

    #[error("direction {0:?} is unbounded for this body")]
    UnboundedDirection(Vec<f64>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("linear program failed: {0}")]
    LinearProgram(String),
}

pub type Result<T> = std::result::Result<T, Error>;
