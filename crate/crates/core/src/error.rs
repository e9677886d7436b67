use thiserror::Error;

/// Failure modes shared by the analytic evaluators and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("cannot parse `{literal}`: {reason}")]
    Parse { literal: String, reason: String },

    #[error("tabulated law has mass {missing:.3e} beyond its table and no tail descriptor")]
    MissingTailDescriptor { missing: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("regime violated: {0}")]
    Regime(String),

    #[error("map value {value} at {at} lies outside [0, 1]")]
    OutOfRange { at: f64, value: f64 },

    #[error("fixed-point iteration stalled after {iterations} steps (last step {last_step:.3e})")]
    NoConvergence { iterations: u64, last_step: f64 },

    #[error("cannot classify: {0}")]
    Unclassifiable(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(literal: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}
