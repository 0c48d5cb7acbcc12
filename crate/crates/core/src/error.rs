use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported word {0}")]
    UnsupportedWord(String),
    #[error("missing integral I[{0}] in sample")]
    MissingIntegral(String),
    #[error("derivative budget exceeded for word {word}: needs {needed}, limit {limit}")]
    Budget {
        word: String,
        needed: usize,
        limit: usize,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
