use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An integration step produced a non-positive wealth. Usually means `dt`
    /// is too large for the noise amplitude.
    #[error("positivity violation: agent {agent} at step {step} (t = {t}) has w = {value}")]
    Positivity {
        agent: usize,
        step: u64,
        t: f64,
        value: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
