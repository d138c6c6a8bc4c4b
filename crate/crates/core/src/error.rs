use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mode: {0}")]
    InvalidMode(String),

    /// A provider group whose mean relevance is zero cannot serve as a merit target.
    #[error("degenerate group {group}: mean relevance is zero")]
    DegenerateGroup { group: usize },

    #[error("{path}:{row}: {msg}")]
    Load { path: PathBuf, row: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short stable identifier used in the CLI's machine-readable error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::InvalidMode(_) => "invalid-mode",
            Error::DegenerateGroup { .. } => "degenerate-group",
            Error::Load { .. } => "load",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Config(_) => "config",
        }
    }
}
