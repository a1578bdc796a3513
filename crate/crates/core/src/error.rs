use thiserror::Error;

/// Errors raised by ring, code and audit operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),

    #[error("ring context mismatch: {0}")]
    ContextMismatch(String),

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: u64, modulus: u64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("vector is not a member of the code")]
    NotInCode,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("component {slot} is not an idempotent of A[x]/(x^n - 1)")]
    NotIdempotent { slot: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
