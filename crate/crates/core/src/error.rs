use thiserror::Error;

/// Errors raised by the entanglement tensor library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid party structure: {0}")]
    Structure(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("zero vector")]
    ZeroVector,

    #[error("parse error at {line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("invalid subset: {0}")]
    Subset(String),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid grouping: {0}")]
    Grouping(String),

    #[error("invalid density matrix: {0}")]
    Density(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
