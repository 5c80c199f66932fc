use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition (dimension mismatch,
    /// empty input, bad configuration).
    #[error("usage error: {0}")]
    Usage(String),

    /// A value lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sequence file or config document is malformed.
    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
