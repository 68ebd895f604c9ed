//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text input (rationals, CSV rows, polynomial terms).
    #[error("parse error: {0}")]
    Parse(String),

    /// A constructor or operation precondition was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Input size exceeds an exact-engine budget; the message names the
    /// limit and the fallback.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A search engine gave up without a verified result.
    #[error("engine failure: {0}")]
    EngineFailure(String),

    /// A randomly chosen projection direction was not generic; retry with
    /// a fresh direction.
    #[error("genericity failure: {0}")]
    GenericityFailure(String),

    /// Degenerate configuration (e.g. sample points did not pin down a
    /// unique quadric); retry with different samples.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// I/O error wrapped with path context by callers.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
