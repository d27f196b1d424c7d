use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the documented range of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Caller broke a structural precondition (shapes, cutoffs, ordering).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A numerical procedure could not produce a trustworthy answer.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The result is limited by the largest precision allowed.
    #[error("precision ceiling reached at {bits} bits: {detail}")]
    PrecisionCeiling { bits: u32, detail: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
