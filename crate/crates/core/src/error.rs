use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("expected {expected} messages, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("signature base is the identity element")]
    IdentityBase,

    #[error("randomizing exponent must be non-zero")]
    ZeroRandomizer,

    #[error("key must sign at least one message")]
    EmptyKey,

    #[error("invalid threshold {threshold} for {count} authorities")]
    InvalidThreshold { threshold: usize, count: usize },

    #[error("authority indices must be distinct and non-zero")]
    BadIndexSet,

    #[error("expected exactly {expected} shares, got {got}")]
    ShareCount { expected: usize, got: usize },

    #[error("signature shares do not carry a common base")]
    MismatchedBase,

    #[error("partial wallets disagree on the coin secret")]
    MismatchedCoinSecret,

    #[error("aggregated signature does not verify")]
    AggregateInvalid,

    #[error("withdrawal response does not answer this request")]
    ResponseMismatch,

    #[error("unblinded signature share does not verify")]
    ShareInvalid,

    #[error("wallet must hold at least one coin")]
    ZeroCoins,

    #[error("cannot spend {requested} coins: wallet at index {index} of {capacity}")]
    InsufficientCoins {
        requested: u32,
        index: u32,
        capacity: u32,
    },

    #[error("coin count must be at least 1")]
    ZeroValue,

    #[error("wallet was issued for the {0} scheme")]
    WrongScheme(&'static str),

    #[error("malformed payment info")]
    BadPaymentInfo,

    #[error("witness does not satisfy equation {0}")]
    UnsatisfiedEquation(usize),

    #[error("malformed statement: {0}")]
    MalformedStatement(&'static str),

    #[error("decode error: {0}")]
    Decode(&'static str),

    #[error("price must be at least 1")]
    ZeroPrice,

    #[error("denomination set must be strictly increasing and start at 1")]
    BadDenominations,

    #[error("price {0} exceeds the oracle range")]
    OracleRange(u64),

    #[error("payment spends {0} coins but parameters only cover {1}")]
    SerialRange(u32, u32),

    #[error("payment was already deposited by this provider")]
    DuplicateDeposit,

    #[error("coin secret collides with a coin index")]
    DegenerateSecret,
}
