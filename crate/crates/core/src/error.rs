use thiserror::Error;

/// Errors raised by the simulation, analytics and harness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A user-supplied object violates its structural invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// The request is well-formed but exceeds what the implementation supports.
    #[error("capability error: {0}")]
    Capability(String),
    #[error("overflow: {0}")]
    Overflow(String),
    /// A regime plan violates one of the finite surrogates of the asymptotic hypotheses.
    #[error("planning error ({hypothesis}): {detail}")]
    Planning { hypothesis: String, detail: String },
    #[error("contract error: {0}")]
    Contract(String),
    /// A run would exceed the configured step budget.
    #[error("resource error: {0}")]
    Resource(String),
    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
