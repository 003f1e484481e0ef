use std::fmt;

/// Broad failure classes; the CLI maps `InvalidInput` to a usage error and the rest
/// to numeric failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ErrorKind {
    InvalidInput,
    Evaluation,
    NotElliptic,
    Winding,
    Convergence,
    Singular,
    Io,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::InvalidInput => "invalid input",
            ErrorKind::Evaluation => "evaluation failure",
            ErrorKind::NotElliptic => "not elliptic",
            ErrorKind::Winding => "winding",
            ErrorKind::Convergence => "not converged",
            ErrorKind::Singular => "singular system",
            ErrorKind::Io => "io",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{module}::{op}: {message} ({kind})")]
pub struct Error {
    pub module: &'static str,
    pub op: &'static str,
    pub kind: ErrorKind,
    pub message: String,
}

impl Error {
    pub fn new(module: &'static str, op: &'static str, kind: ErrorKind, message: impl Into<String>) -> Self {
        Error { module, op, kind, message: message.into() }
    }

    pub fn invalid(module: &'static str, op: &'static str, message: impl Into<String>) -> Self {
        Self::new(module, op, ErrorKind::InvalidInput, message)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::new("io", "read/write", ErrorKind::Io, e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
