use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("state space of dimension {dim} exceeds the cap of {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("eigenbranch matching failed: {msg}\noverlap matrix:\n{overlaps}")]
    BranchMatching { msg: String, overlaps: String },

    #[error("lambda = {lambda} is excluded: {reason}")]
    Excluded { lambda: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
