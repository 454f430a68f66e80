use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("content rank {rank} outside catalog 1..={m}")]
    RankOutOfRange { rank: u64, m: u64 },

    #[error("terminal {terminal} is unreachable from helper {helper}")]
    Unreachable { helper: usize, terminal: usize },

    #[error("requests must be distinct per dependency graph vertex; content {rank} appears twice")]
    DuplicateRequest { rank: u32 },

    #[error("exact clique cover supports at most {max} vertices, got {n}")]
    OracleTooLarge { n: usize, max: usize },

    #[error("terminal {terminal} could not decode content {want}")]
    DecodeFailure { terminal: usize, want: u32 },

    #[error("payload mismatch at terminal {terminal} for content {rank}")]
    PayloadMismatch { terminal: usize, rank: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
