use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported algebra {0:?}; expected one of so31, iso21, so22, so41, so32, so4, iso3, iso31")]
    UnknownAlgebra(String),

    #[error("algebra mismatch: {0} vs {1}")]
    AlgebraMismatch(String, String),

    #[error("{0}")]
    Unsupported(String),

    #[error("degree overflow: degree {degree} exceeds torus dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate coframe: {0}")]
    DegenerateCoframe(String),

    #[error("non-invertible group element at chart point {0:?}")]
    NonInvertible(Vec<f64>),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
