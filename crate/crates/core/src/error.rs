use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("singular geometry: {0}")]
    Singular(String),
    #[error("ill-conditioned kernel matrix ({0}); try a larger noise variance")]
    IllConditioned(String),
    #[error("trace {path}: {message}")]
    Trace { path: String, message: String },
    #[error("invalid config `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("at t = {time:.3} s: {source}")]
    AtStep {
        time: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn at(self, time: f64) -> Self {
        Error::AtStep {
            time,
            source: Box::new(self),
        }
    }
}
