use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    AlphaOutOfRange(String),

    #[error("index set must not be empty")]
    EmptySubset,

    #[error("index {index} out of range for {len} vectors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate index {0} in subset")]
    DuplicateIndex(usize),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("state budget exhausted: {states} states exceed the limit of {limit}")]
    ResourceExhausted { states: u64, limit: u64 },

    #[error("deadline exceeded after layer {layer}")]
    Timeout { layer: usize },

    #[error("sum vector not present in the state set")]
    StateNotFound,

    #[error("{what} is limited to {limit}, got {got}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid X3C instance: {0}")]
    InvalidX3c(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("non-finite coordinate {0}")]
    NonFinite(f64),

    #[error("solver solution: {0}")]
    Solution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
