use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid arguments: wrong sizes, counts, or indices.
    #[error("arity error: {0}")]
    Arity(String),

    /// Duplicate points make a leave-one-out nearest-neighbor distance zero,
    /// which the entropy estimator cannot absorb (log of zero volume).
    #[error("degenerate data: points {i} and {j} coincide")]
    DegenerateData { i: usize, j: usize },

    /// A matrix required to be symmetric positive definite is not.
    #[error("decomposition error: {0}")]
    NotPositiveDefinite(String),

    /// Malformed input text (CSV datasets, plan files).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
