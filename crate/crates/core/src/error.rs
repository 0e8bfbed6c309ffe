use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("corrupt mask: {0}")]
    CorruptMask(String),

    #[error("invalid weight matrix: {0}")]
    InvalidMatrix(String),

    #[error("empty video: the first frame carries no proposals")]
    EmptyVideo,

    #[error("invalid association: {0}")]
    InvalidAssociation(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("class head weights error: {0}")]
    Weights(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("oracle size limit exceeded: {0}")]
    OracleSize(String),

    #[error("fixture spec error: {0}")]
    Spec(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 1: input rejected (validation, format, spec); 2: I/O; 3: internal invariant failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::InvalidAssociation(_) | Error::OracleSize(_) => 3,
            _ => 1,
        }
    }
}
