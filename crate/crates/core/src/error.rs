use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("cannot parse polynomial near `{token}`: {reason}")]
    PolyParse { token: String, reason: String },

    #[error("malformed sign word: unexpected `{token}` (expected `+` or `-`)")]
    SignWord { token: String },

    #[error("polynomial has negative coefficients: {0}")]
    NegativeCoefficients(String),

    #[error("illegal shift: {0}")]
    IllegalShift(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("malformed module: {0}")]
    Module(String),
}

pub type Result<T> = std::result::Result<T, Error>;
