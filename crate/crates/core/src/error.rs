use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("entropy source failure: {0}")]
    Rng(String),
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("malformed encoding: {0}")]
    Encoding(String),
    #[error("element is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("discrete log oracle is only available on brute-forceable toy groups")]
    DlogUnsupported,
    #[error("no discrete log found")]
    DlogNotFound,
    #[error("identity is {0} bytes, the maximum is 65535")]
    IdentityTooLong(usize),
    #[error("H2 expects 7 or 9 shared values, got {0}")]
    ZCount(usize),
    #[error("partial private key does not verify")]
    InvalidPartialKey,
    #[error("peer public key rejected")]
    InvalidPeerKey,
    #[error("peer ephemeral element rejected")]
    InvalidPeerEphemeral,
    #[error("session is not in a state that accepts this input: {0}")]
    SessionState(&'static str),
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("user {0} already exists")]
    DuplicateUser(String),
    #[error("unknown instance ({0}, {1})")]
    UnknownInstance(String, u32),
    #[error("instance ({0}, {1}) already exists")]
    DuplicateInstance(String, u32),
    #[error("the Test query was already asked")]
    RepeatedTest,
    #[error("Test target has not accepted")]
    TestNotAccepted,
    #[error("Test target is not fresh")]
    Unfresh,
    #[error("replacement public key does not match the supplied secret value")]
    ReplacementMismatch,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
