use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("unsupported lattice: {0}")]
    UnsupportedLattice(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator has an odd number of XZ sites and is not Hermitian")]
    NonHermitian,

    #[error("{n_qubits} qubits exceeds the capacity of {max} for this operation")]
    Capacity { n_qubits: usize, max: usize },

    #[error(
        "Lanczos did not converge after {iterations} matvecs (best residual {best_residual:e})"
    )]
    Convergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("odd-parity vertex labels on a closed complex give the zero vector")]
    UnphysicalSector,

    #[error("operator is outside the dual algebra: {0}")]
    NotInDualAlgebra(String),

    #[error("invalid string path: {0}")]
    InvalidPath(String),

    #[error("string paths have different endpoints")]
    EndpointMismatch,

    #[error("need at least {needed} levels, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
