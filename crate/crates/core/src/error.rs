use thiserror::Error;

/// Errors raised by the library. Validation failures of ramification data
/// carry their own type so callers can report the witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("derivative order {j} exceeds series order {order}")]
    DerivativeTooHigh { j: usize, order: usize },

    #[error("series has nonzero constant term")]
    NonzeroConstantTerm,

    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,

    #[error("Bell polynomial B({m},{j}) is undefined")]
    BellIndex { m: usize, j: usize },

    #[error("Bell polynomial B({m},{j}) needs {needed} arguments, got {got}")]
    BellArity { m: usize, j: usize, needed: usize, got: usize },

    #[error("nu_{m} requires nu_1..nu_{} to be present, family has {have}", m - 1)]
    MissingPredecessors { m: usize, have: usize },

    #[error("truncation order {order} is smaller than requested n = {n_max}")]
    OrderTooSmall { order: usize, n_max: usize },

    #[error("{what} = {value} exceeds the configured bound {bound}")]
    BoundExceeded { what: &'static str, value: usize, bound: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("tree is unstable after smoothing: {0}")]
    Unstable(String),

    #[error(transparent)]
    Validation(#[from] crate::chambers::ValidationError),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no adjacent pair found across the wall within {budget} attempts")]
    SearchExhausted { budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
