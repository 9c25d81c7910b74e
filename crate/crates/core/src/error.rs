use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("sidedness mismatch")]
    SidednessMismatch,
    #[error("invalid symbol {symbol} for alphabet of size {alphabet}")]
    InvalidSymbol { symbol: u8, alphabet: usize },
    #[error("window {window} is shorter than forbidden word of length {len}")]
    WindowTooShort { window: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource cap exceeded: {what} would reach {requested} (cap {cap})")]
    ResourceCap {
        what: &'static str,
        requested: u128,
        cap: u128,
    },
    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("operation requires a {expected} system")]
    WrongSystem { expected: &'static str },
    #[error("{0} is not a beta-number: g^{1}(t) >= t")]
    NotBetaNumber(String, usize),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("schema error at {pointer:?}: {message}")]
    Schema { pointer: String, message: String },
    #[error("orbit of {0} is not eventually periodic")]
    Aperiodic(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
