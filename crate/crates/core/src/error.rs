use thiserror::Error;

use crate::model::Family;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {dim} exceeds the three-qubit cap of {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid subsystem layout: {0}")]
    Subsystems(String),

    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),

    #[error("operation not supported for family {0:?}")]
    UnsupportedFamily(Family),

    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse potential spec: {0}")]
    ParseSpec(String),

    #[error("state collapsed to zero norm")]
    ZeroNorm,

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("state does not factor into a product (schmidt λ2 = {lambda2:e})")]
    Factorization { lambda2: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
