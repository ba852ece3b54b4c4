use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: row {row}: cannot parse {value:?} as a number", path.display())]
    Parse {
        path: PathBuf,
        row: u64,
        value: String,
    },

    #[error("{}: column {column} has no values", path.display())]
    EmptyColumn { path: PathBuf, column: String },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate signal: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class: 2 for I/O and input files,
    /// 3 for configuration, 4 for numerical problems with the data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::EmptyColumn { .. } | Error::Format { .. } => 2,
            Error::Config(_) => 3,
            Error::InvalidInput(_) | Error::Degenerate(_) | Error::Numerical(_) => 4,
        }
    }

    /// Short machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::EmptyColumn { .. } => "empty_column",
            Error::Format { .. } => "format",
            Error::Config(_) => "config",
            Error::InvalidInput(_) => "invalid_input",
            Error::Degenerate(_) => "degenerate",
            Error::Numerical(_) => "numerical",
        }
    }
}
