use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cutoff mismatch: {0}")]
    CutoffMismatch(String),

    #[error("mode-count mismatch: {process} requires {required} mode(s), cutoff has {got}")]
    ModeMismatch {
        process: &'static str,
        required: usize,
        got: usize,
    },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),

    #[error("hypergeometric pole: c = {c} is a nonpositive integer above a = {a}")]
    Pole { a: i64, c: i64 },

    #[error("underdetermined fit: {needed} independent probes required, {got} available ({context})")]
    Underdetermined { needed: usize, got: usize, context: String },

    #[error("rank-deficient design matrix: {0}")]
    RankDeficient(String),

    #[error("probe {index} keeps only {weight:.4} of its weight inside the cutoff (minimum {minimum})")]
    TruncationLoss { index: usize, weight: f64, minimum: f64 },

    #[error("gamma saturates for epsilon = {0}")]
    Saturation(f64),

    #[error("required cutoff exceeds {limit}")]
    Overflow { limit: u64 },

    #[error("two-mode tensor with nmax = {n_max} exceeds the memory cap nmax <= {cap}")]
    MemoryGuard { n_max: usize, cap: usize },

    #[error("{path}:{line}: malformed: {message}")]
    Malformed { path: String, line: usize, message: String },

    #[error("record {record}: {message}")]
    InvariantViolation { record: usize, message: String },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
