use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid UTF-8")]
    Decode { path: PathBuf, line: usize },

    /// A data file violates its documented layout.
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// The caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("no candidates for {0:?}")]
    NoCandidates(String),

    #[error("could not induce a non-word from {word:?} within {attempts} attempts")]
    InductionExhausted { word: String, attempts: usize },

    #[error("corpus exhausted after {achieved} of {target} instances")]
    CorpusExhausted { achieved: usize, target: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
