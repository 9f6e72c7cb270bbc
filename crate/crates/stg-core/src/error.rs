//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid probability {0}: must be a rational in [0, 1]")]
    InvalidProbability(String),

    #[error("vertex {0} out of range for a graph on {1} vertices")]
    VertexOutOfRange(usize, usize),

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("history has {got} bits but the law expects {expected}")]
    HistoryMismatch { expected: usize, got: usize },

    #[error("no path from {from} to {to} in the positive-probability support")]
    NoPath { from: usize, to: usize },

    #[error("edge {0} has appearance probability 0 and cannot be traversed")]
    ZeroProbabilityEdge(usize),

    #[error("expected arrival time is infinite: {0}")]
    InfiniteExpectation(String),

    #[error("{what} needs {needed} but the budget allows {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("did not converge within {iters} iterations (residual {residual})")]
    NonConvergence { iters: u64, residual: f64 },

    #[error("low-confidence estimate: {failures} of {total} runs never connected")]
    LowConfidence { failures: u64, total: u64 },

    #[error("no ordering of the value table satisfies all optimality constraints")]
    NoConsistentOrdering,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors that mean "the requested instance is too large",
    /// as opposed to malformed or infeasible input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
