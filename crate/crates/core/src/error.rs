use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("matrix is not invertible over the polynomial ring")]
    NotInvertible,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("degree bound {bound} too small for {context} (witness degree {needed})")]
    DegreeBoundTooSmall {
        bound: usize,
        needed: usize,
        context: String,
    },
    #[error("exploration depth too small: {0}")]
    DepthTooSmall(String),
    #[error("edge not present in presentation: {0}")]
    EdgeNotPresent(String),
    #[error("incompatible weight: cocycle weight {weight}, step function degree {degree}")]
    IncompatibleWeight { weight: usize, degree: usize },
    #[error("invariance violation: {0}")]
    InvarianceViolation(String),
    #[error("edge outside explored region: {0}")]
    OutOfExploredRegion(String),
    #[error("cyclic closure incomplete: dimension {dimension} of {expected}")]
    ClosureIncomplete { dimension: usize, expected: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
