use std::io;

use thiserror::Error;

/// Errors produced anywhere in the fitness/complexity toolkit.
#[derive(Error, Debug)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation: {0}")]
    Validation(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("config: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("numerical: {0}")]
    Numerical(String),

    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    /// Short machine-readable category name.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Usage(_) => "usage",
            Error::Numerical(_) => "numerical",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
