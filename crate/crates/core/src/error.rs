use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operation was called with arguments violating its precondition.
    #[error("rejected input: {0}")]
    RejectedInput(String),

    /// An expression or word does not have the shape an operation requires.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// The document parsed but does not describe a well-formed net.
    #[error("semantic error: {0}")]
    Semantic(String),

    #[error(
        "budget exceeded: {needed} rounds required, budget is {budget} (use force to override)"
    )]
    BudgetExceeded { needed: String, budget: u64 },

    /// A property guaranteed by the construction failed to hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
