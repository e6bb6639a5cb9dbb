use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be odd and at least 3, got {0}")]
    InvalidModulus(BigUint),

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(BigUint),

    #[error("{0} is a perfect square")]
    PerfectSquare(BigUint),

    #[error("zero has no odd-factor decomposition")]
    ZeroDecomposition,

    #[error("{0} is not a prime power >= 3")]
    NotPrimePower(BigUint),

    #[error("operands belong to different rings")]
    ContextMismatch,

    #[error("divisor polynomial must be monic of degree >= 1")]
    BadDivisor,

    #[error("Jacobi symbol ({q} / {n}) is zero")]
    JacobiZero { q: BigUint, n: BigUint },

    #[error("did not find a QNR within {limit} iterations")]
    QnrSearchExhausted { limit: u64 },

    #[error("did not find a QNR or a Miller-Rabin witness within {limit} iterations")]
    QnrOrWitnessSearchExhausted { limit: u64 },

    #[error("parameter search for {n} exceeded {cap} primes")]
    ParameterSearchExhausted { n: BigUint, cap: u64 },

    #[error("{0} does not satisfy n mod 24 = 1")]
    NotOneMod24(BigUint),

    #[error("line {line}: invalid integer token {token:?}")]
    Parse { line: usize, token: String },

    #[error("invalid expression {input:?}: {reason}")]
    Expression { input: String, reason: String },

    #[error("{0} is outside the range of the trial-division oracle")]
    OracleRange(BigUint),

    #[error("limit {0} exceeds the supported bound")]
    LimitTooLarge(u64),

    #[error("malformed certificate: {0}")]
    Certificate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
