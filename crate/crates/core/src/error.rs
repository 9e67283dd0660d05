use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dimension {0} does not fit a 32-bit index")]
    IndexOverflow(usize),

    #[error("block dimension {0} is not a power of two")]
    BlockNotPowerOfTwo(usize),

    #[error("block dimension {0} exceeds 2^16 (local indices are 16-bit)")]
    BlockTooLarge(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid generator parameters: {0}")]
    InvalidGenerator(String),

    #[error("matrix has no nonzeros")]
    EmptyMatrix,

    #[error("invalid model input: {0}")]
    InvalidModel(String),

    #[error("Matrix Market parse error at line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error("download failed for {url}: {msg}")]
    Download { url: String, msg: String },

    #[error("archive {0} does not contain a .mtx member")]
    MissingMtxMember(PathBuf),

    #[error("kernel validation failed: {0}")]
    Validation(String),

    #[error("benchmark configuration: {0}")]
    BenchConfig(String),

    #[error("report input: {0}")]
    Report(String),

    #[error("CSV parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
