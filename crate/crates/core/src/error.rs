use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("mass M = {mass} does not exceed the critical mass 2")]
    CriticalMassNotExceeded { mass: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("time horizon T = {horizon} must be below ln 2 / M = {limit}")]
    HorizonTooLong { horizon: f64, limit: f64 },

    #[error("numerical divergence at t = {time}: {detail}")]
    Divergence { time: f64, detail: String },

    #[error("no convergence after {iterations} iterations (last update {last_update:e})")]
    NonConvergence { iterations: usize, last_update: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
