use thiserror::Error;

/// Errors surfaced by the toolkit's fallible operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Network size below the operation's minimum.
    #[error("invalid network size n={n}: must be at least {min}")]
    InvalidSize { n: usize, min: usize },

    /// Node id outside `[1, n]`.
    #[error("node {node} out of range for network of size {n}")]
    InvalidNode { node: u32, n: usize },

    /// Two values that must agree (sizes, round indices) do not.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Argument outside a formula's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Serialized input that does not decode to a valid value.
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
