use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or contract-violating input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A configured size cap would be exceeded.
    #[error("resource limit exceeded: {what} (limit {limit})")]
    ResourceLimit { what: String, limit: usize },
    /// A geometric face with zero volume where a full-dimensional one is required.
    #[error("degenerate face {0}")]
    DegenerateFace(String),
    /// An internal consistency check failed, e.g. a boundary that does not square to zero.
    #[error("inconsistent chain complex: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Outcome of a certificate check: valid, or invalid with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Verdict {
    pub valid: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn ok() -> Self {
        Verdict { valid: true, reason: None }
    }

    pub fn fail(reason: impl Into<String>) -> Self {
        Verdict { valid: false, reason: Some(reason.into()) }
    }
}
