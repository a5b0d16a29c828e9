use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The integrand produced a NaN or infinity, even after nudging the node.
    #[error("integrand is not finite at x = {x} (value {value})")]
    NonFinite { x: f64, value: f64 },

    #[error("interpolation nodes are not distinct")]
    DuplicateNodes,

    #[error("linear system is singular")]
    Singular,

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("unknown test family `{0}`")]
    UnknownFamily(String),

    #[error("cannot parse instance record: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QuadError>;
