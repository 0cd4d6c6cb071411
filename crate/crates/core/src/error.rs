use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid population: {0}")]
    Validation(String),

    #[error("integration failed at t = {time}: {message}; retry with a smaller step")]
    Integration { time: f64, message: String },

    #[error("solver failed: {message} (residual {residual:e})")]
    Solver { message: String, residual: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("singular derivative: {0}")]
    Singularity(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn solver(msg: impl Into<String>, residual: f64) -> Self {
        Error::Solver {
            message: msg.into(),
            residual,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
