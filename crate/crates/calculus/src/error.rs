use alloc::string::String;

/// Failures reported by the calculus crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),
    /// Argument lies outside the set where the operation is defined.
    #[error("outside domain: {0}")]
    Domain(String),
    /// Both the Newton path and the sampling fallback failed; the true value
    /// lies in `[lower, upper]`.
    #[error("indeterminate dual value, bracket [{lower}, {upper}]")]
    Indeterminate { lower: f64, upper: f64 },
    /// Random generation exhausted its retry budget.
    #[error("generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
