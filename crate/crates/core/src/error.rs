use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("index {n} exceeds the configured cap {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("modulus {modulus} shares a factor with coefficient denominator {denominator}")]
    CoprimalityViolation { modulus: u64, denominator: String },

    #[error("non-integral value at step {0}")]
    NonIntegral(u64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed A-number {0:?}")]
    MalformedANumber(String),

    #[error("network disabled and {0} is not cached")]
    NetworkDisabled(String),

    #[error("http error: {0}")]
    Http(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
