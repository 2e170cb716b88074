use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument beyond the range covered by a precomputed table.
    #[error("out of range: {what} = {value} exceeds limit {limit}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: u64,
    },

    /// A configured resource cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Working precision too low to certify the requested result.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// Caller violated an operation precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed textual input (expressions, ratios, ladders).
    #[error("parse error: {0}")]
    Parse(String),

    /// Table file I/O and format failures.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable identifier used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::OutOfRange { .. } => "out_of_range",
            Error::Resource(_) => "resource",
            Error::Precision(_) => "precision",
            Error::Contract(_) => "contract",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
