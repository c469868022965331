use thiserror::Error;

/// Errors raised by the simulation, analysis and reporting layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain (bad site, bit-string, size).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine failed to converge or lost accuracy.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The request exceeds what the dense engine is configured to handle.
    #[error("capability error: {0}")]
    Capability(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
