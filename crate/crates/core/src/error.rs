use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied parameters outside the operation's contract.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("protocol violation in round {round}: message {from}->{to} has {bits} bits (limit {limit})")]
    Bandwidth {
        round: usize,
        from: NodeId,
        to: NodeId,
        bits: usize,
        limit: usize,
    },

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("round budget of {budget} exhausted with {pending} nodes still running")]
    Timeout { budget: usize, pending: usize },

    /// An algorithm detected it cannot finish from the lists it was given.
    #[error("coloring failed at edge {edge} during {stage}: {reason}")]
    ColoringFailed {
        edge: EdgeId,
        stage: String,
        reason: String,
    },

    /// A runtime invariant check failed. Never expected on valid input.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
