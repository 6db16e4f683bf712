use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// The variants are grouped by how a caller should react: input errors mean
/// the problem as given is malformed, budget errors mean a configured cap was
/// hit, and `Internal` signals a broken invariant inside the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{m} inequality constraints exceed the face budget of {budget}; raise the face budget to enumerate 2^{m} faces")]
    FaceBudget { m: usize, budget: usize },

    #[error("sampling oracle refuses n = {n} (limit {limit}); symbolic bounds are still available")]
    OracleGuard { n: usize, limit: usize },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::FaceBudget { .. } | Error::OracleGuard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
