use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("non-finite state at step {step}")]
    Overflow { step: usize },

    #[error("sequence of length {len} is too short, need more than {needed}")]
    InsufficientLength { len: usize, needed: usize },

    #[error("resident slope vanishes at {at} (derivative {slope})")]
    DegenerateSlope { at: f64, slope: f64 },

    #[error("slope ratio {ratio} is positive; the lower bound for a non-growing resident does not apply")]
    InapplicableCase { ratio: f64 },

    #[error("horizon {requested} exceeds the dense storage limit {limit}")]
    HorizonTooLong { requested: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            value,
            reason: reason.into(),
        }
    }
}
