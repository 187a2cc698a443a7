use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("objective is not finite at the initial point")]
    InvalidStart,

    #[error("config syntax error at line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {msg}")]
    Data { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
