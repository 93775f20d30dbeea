use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("partial quotient does not fit in 64 bits")]
    DigitOverflow,

    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certification reached depth {achieved} of {required} digits (try at least {suggested_bits} bits)")]
    Certification {
        achieved: usize,
        required: usize,
        suggested_bits: u32,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
