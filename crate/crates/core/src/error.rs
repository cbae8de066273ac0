use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence index must be at least 1, got {0}")]
    InvalidIndex(i128),

    #[error("{0} is not 1 or congruent to +-1 mod 6")]
    NotSixXPlusMinusOne(BigInt),

    #[error("family index 0 does not exist")]
    ZeroFamilyIndex,

    #[error("{x} is not in the domain of f_{index}")]
    OutsideDomain { index: i64, x: BigInt },

    #[error("parameter `{name}` must be at least {min}, got {got}")]
    OutOfRange {
        name: &'static str,
        min: u64,
        got: u64,
    },

    #[error("collatz input must be a positive integer, got {0}")]
    NonPositive(BigInt),

    #[error("empty composition chain")]
    EmptyChain,

    #[error("cannot parse family index `{0}`")]
    ParseIndex(String),

    #[error("chain search with depth {depth} and |k| <= {max_k} exceeds 128-bit exact arithmetic")]
    SearchTooLarge { depth: u32, max_k: u32 },

    #[error("parameter `{name}` is outside the supported range: {detail}")]
    Unsupported { name: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
