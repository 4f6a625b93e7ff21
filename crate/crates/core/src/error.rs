use thiserror::Error;

/// Errors raised by the testers, the oracle game and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: u32, found: u32 },

    #[error("unsupported dimension {n}: {reason}")]
    UnsupportedDimension { n: u32, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An adversary strategy proposed manipulations outside its budget or kind.
    /// This is a bug in the strategy, never a game outcome.
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    /// The session already aborted on a protocol violation.
    #[error("session aborted after a protocol violation")]
    SessionAborted,

    #[error("batch size m = {m} exceeds n/3 for n = {n}; use the sample-based tester for this regime")]
    OutsideCaseOne { m: u32, n: u32 },

    #[error("t = {t} exceeds the admissible manipulation rate {bound} (t <= c*min(eps^2, 1/n^2)*2^n with c = {c})")]
    InadmissibleRate { t: f64, bound: f64, c: f64 },

    #[error("duplicate interpolation node at {0}")]
    DuplicateNode(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
