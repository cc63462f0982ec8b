//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`].  Precondition violations are
//! reported as errors, never silently coerced: a convergence failure, an
//! inadmissible weight, or a missing root of unity is a caller bug or a
//! genuine mathematical obstruction, and the variants keep those apart.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("division by an element that is zero at working precision")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("convergence precondition violated: {0}")]
    Convergence(String),

    #[error("unsupported extension: {0}")]
    UnsupportedExtension(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("weight {k} is not admissible for this disc")]
    Inadmissible { k: i64 },

    #[error("level violation: {0}")]
    Level(String),

    #[error("context has no root of unity of order {0}")]
    MissingRoot(u64),

    #[error("no n-th root in this context: {0}")]
    NoRoot(String),

    #[error("Heegner hypothesis fails: {0}")]
    Heegner(String),

    #[error("parity obstruction: {0}")]
    Parity(String),

    #[error("ideal not coprime to the modulus: {0}")]
    NonCoprime(String),

    #[error("exceptional vanishing: {0}")]
    ExceptionalZero(String),

    #[error("relation set is inconsistent: {0}")]
    RelationInconsistent(String),

    #[error("fixture rejected: {0}")]
    Fixture(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialisation: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
