use thiserror::Error;

/// Errors produced by the recognition pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text input (vector file, signature CSV, model file) could not be parsed.
    /// `line` is 1-based.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("joint state space of {0} assignments is too large to enumerate")]
    StateSpaceTooLarge(u128),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
