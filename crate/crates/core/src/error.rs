use thiserror::Error;

use crate::epsrange::RangeViolation;

/// Errors raised by every fallible operation in the crate.
///
/// The variants map onto the CLI exit codes: parameter and precondition
/// failures exit with 2, unsupported model features with 3 and numerical
/// breakdowns with 4.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("epsilon-range violation: {0}")]
    Range(#[from] RangeViolation),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed ({condition}): {detail}")]
    Precondition { condition: &'static str, detail: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("model file: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn precondition(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition {
            condition,
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Range(_) | Error::Domain(_) | Error::Precondition { .. } | Error::Spec(_) => 2,
            Error::Unsupported(_) => 3,
            Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects non-finite or non-positive reals with a named domain error.
pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be a positive finite real, got {value}")))
    }
}
