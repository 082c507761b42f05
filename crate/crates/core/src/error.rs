use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or algorithm parameter violates its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The requested value is not attained by a bounded comparison function.
    #[error("value {value} lies outside the range of the comparison function")]
    Range { value: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} out of range for series of length {len}")]
    Index { index: usize, len: usize },

    /// A configuration failed validation; every offending field is listed.
    #[error("invalid configuration: {}", format_issues(.0))]
    InvalidConfig(Vec<FieldIssue>),

    /// The time integrator produced a non-finite value.
    #[error("integrator diverged at step {step} (t = {t})")]
    Divergence { step: usize, t: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { name, reason: reason.into() }
    }
}

/// One failed check in a configuration, keyed by the dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIssue {
    pub field: String,
    pub reason: String,
}

impl fmt::Display for FieldIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

fn format_issues(issues: &[FieldIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
