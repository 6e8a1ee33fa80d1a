use thiserror::Error;

/// Errors raised across the library. The variants map onto the CLI exit
/// codes: usage/parse errors exit 1, property violations exit 2,
/// resource and inconclusive outcomes exit 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("oracle inconclusive: {0}")]
    Inconclusive(String),

    #[error("property violation: {0}")]
    Violation(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Parse { .. } | Error::NotAnAutomorphism(_) => 1,
            Error::Violation(_) => 2,
            Error::Resource(_) | Error::Numeric(_) | Error::Inconclusive(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
