use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension computations need at least 2 rows, got {0}")]
    TooFewRows(usize),

    #[error("matrix must have at least one column")]
    NoColumns,

    #[error("matrix has no rows")]
    EmptyData,

    #[error("expected {expected} values for a {rows}x{cols} matrix, got {actual}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value {value} at row {row}, column {col}")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("feature index {index} out of range for {cols} columns")]
    FeatureOutOfRange { index: usize, cols: usize },

    #[error("invalid support sequence: {0}")]
    InvalidSupport(String),

    #[error("support sequence ends at {last} but the data has {rows} rows")]
    SupportMismatch { last: usize, rows: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("discard fraction {0} must lie in [0, 1)")]
    FractionOutOfRange(f64),

    #[error("selection would discard {discard} of {cols} features and leave none")]
    NothingKept { discard: usize, cols: usize },

    #[error("invalid selection plan: {0}")]
    InvalidPlan(String),

    #[error("every feature has zero normalized discriminability")]
    ZeroDiscriminability,

    #[error("oracle guard exceeded: {0}")]
    OracleGuard(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("bad magic {0:?}, expected \"GDM1\"")]
    BadMagic([u8; 4]),

    #[error("truncated matrix file: header declares {expected} payload bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("name {0:?} contains a newline")]
    NameWithNewline(String),

    #[error("malformed context: {0}")]
    MalformedContext(String),

    #[error("unknown attribute ids: {0:?}")]
    UnknownAttributes(Vec<String>),

    #[error("labels: {0}")]
    Labels(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
