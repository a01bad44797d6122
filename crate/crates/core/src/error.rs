use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while loading data or computing an audit.
#[derive(Error, Debug)]
pub enum Error {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("pair ({row}, {col}) on line {line} is outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfBounds {
        line: usize,
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bundle {0} has interactions but no items")]
    EmptyBundle(usize),

    #[error("user {0} appears more than once in the predictions")]
    DuplicateUser(usize),

    #[error("user {user} lists bundle {bundle} more than once")]
    DuplicateBundle { user: usize, bundle: usize },

    #[error("id out of range on line {line}: {message}")]
    Range { line: usize, message: String },

    #[error("user {user} has {len} recommendations but K is {k}")]
    ListTooLong { user: usize, len: usize, k: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
