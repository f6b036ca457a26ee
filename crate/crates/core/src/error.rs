use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("point set is empty")]
    EmptySet,
    #[error("value {0} lies outside [0, 1]")]
    OutOfRange(String),
    #[error("translation {delta} is not in [0, 1/{n})")]
    DeltaOutOfRange { n: usize, delta: String },
    #[error("interval ({0}, {1}) has lower end above upper end")]
    MalformedInterval(String, String),
    #[error("function takes negative values on a set of positive measure")]
    NegativeValues,
    #[error("expected a step function (all pieces constant)")]
    NotAStepFunction,
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("tolerance must be positive")]
    ToleranceInvalid,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid psi specification: {0}")]
    InvalidPsi(String),
    #[error("malformed piecewise polynomial: {0}")]
    MalformedPiecewise(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
