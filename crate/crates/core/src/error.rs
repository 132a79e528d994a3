use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid UTF-8 at byte offset {offset}")]
    Encoding { offset: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("vertex {vertex} has zero degree")]
    ZeroDegree { vertex: usize },

    #[error(
        "eigensolver failed to converge for eigenvalue {index} after {iterations} iterations \
         (off-diagonal residual {residual:e})"
    )]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("missing {} (run `{stage}` first)", path.display())]
    MissingArtifact { path: PathBuf, stage: &'static str },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code for this error: 1 usage, 2 I/O, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) => 1,
            Error::ZeroDegree { .. } | Error::NoConvergence { .. } => 3,
            Error::Encoding { .. }
            | Error::Parse { .. }
            | Error::Validation(_)
            | Error::Io { .. }
            | Error::MissingArtifact { .. } => 2,
        }
    }
}
