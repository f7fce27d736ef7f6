use std::path::PathBuf;

/// Crate-wide error type.
///
/// Variants are grouped by how a caller should react: `Io`/`Malformed`/
/// `EmptyResult` are input problems, `InvalidArgument` is a caller bug,
/// and `Numerical` means an iterative computation produced non-finite
/// values and the run cannot be trusted.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty result: {0}")]
    EmptyResult(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad inputs or arguments rather than by
    /// numerical breakdown. Used by callers to pick exit codes.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
