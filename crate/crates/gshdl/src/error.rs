use std::path::PathBuf;

/// Errors raised across the pipeline. Each variant maps to a stable category
/// string used by the CLI when reporting failures on stderr.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable category for CLI error reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Dimension(_) => "dimension",
            Error::Data(_) => "data",
            Error::Numerical(_) => "numerical",
            Error::Format(_) => "format",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
