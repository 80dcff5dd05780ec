use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration text is not well-formed or has unknown keys.
    #[error("config parse error: {0}")]
    Parse(String),

    /// A parameter violates one of its invariants. `field` names the key.
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("step size {dt} s exceeds the limit of {limit} s")]
    StepSize { dt: f64, limit: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("thrust vector magnitude {0} N is too small to define an attitude")]
    DegenerateThrust(f64),

    #[error("empty trace")]
    EmptyTrace,

    /// Scenario or run setup that cannot be executed.
    #[error("config error: {0}")]
    Config(String),

    /// Non-finite state detected while stepping.
    #[error("simulation fault at tick {tick}: {reason}")]
    SimulationFault { tick: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
