use thiserror::Error;

/// Errors produced by the netspace library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported exponent: {0}")]
    UnsupportedExponent(String),
    #[error("undefined ratio: the input function is identically zero")]
    UndefinedRatio,
    #[error("interpolation functional did not stabilize: {0}")]
    Divergence(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
