use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid expression: {0}")]
    InvalidExpression(String),
    #[error("materialization budget exceeded: need {needed} vertices, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("malformed f-SLP: {0}")]
    MalformedSlp(String),
    #[error("preorder number {index} out of range (forest has {size} vertices)")]
    OutOfRange { index: String, size: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("composition of incompatible morphisms: {0}")]
    Incompatible(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
