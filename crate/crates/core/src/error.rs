use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad header {path}: {msg}")]
    Header { path: PathBuf, msg: String },

    #[error("size mismatch: header declares {expected} bytes, file has {found}")]
    SizeMismatch { expected: u64, found: u64 },

    #[error("unsupported ENVI data type {0} (supported: 2, 4, 12)")]
    UnsupportedDataType(u32),

    #[error("unsupported byte order {0} (only 0 = little-endian)")]
    UnsupportedByteOrder(u32),

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectrum length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
