use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KissError {
    /// A precondition on the numeric inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A shell is too large to enumerate under the configured cap.
    #[error("enumeration cap exceeded: shell {shell} has {size} points (cap {cap})")]
    CapExceeded {
        shell: usize,
        size: String,
        cap: u64,
    },

    /// A constructed or loaded code failed distance or size certification.
    #[error("certification failed: {0}")]
    Certification(String),

    /// A bracketed root search found no sign change.
    #[error("no sign change on [{lo}, {hi}]: {at_lo} and {at_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        at_lo: f64,
        at_hi: f64,
    },

    /// A certificate file could not be parsed.
    #[error("malformed certificate at line {line}: {reason}")]
    Format { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, KissError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(KissError::Domain(msg.into()))
}
