use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("position {position} out of range for a permutation of length {len}")]
    IndexOutOfRange { position: usize, len: usize },

    #[error("operation requires a nonempty operand")]
    EmptyOperand,

    #[error("operand must have length greater than 1")]
    OperandTooShort,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("permutation of length {len} exceeds the configured cap of {cap}")]
    TooLarge { len: usize, cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("{0} is not an increasing oscillation")]
    NotAnOscillation(String),

    #[error("{sigma} is not contained in {pi}")]
    NotContained { sigma: String, pi: String },

    #[error("checked arithmetic overflow")]
    Overflow,

    #[error("invalid range: {0}")]
    RangeError(String),

    #[error("cannot parse permutation {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
