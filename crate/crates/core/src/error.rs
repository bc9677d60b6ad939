use crate::dynamics::CFExpansion;

pub type Result<T> = std::result::Result<T, Error>;

/// Error vocabulary shared by the library and the CLI front end.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} fails the deterministic primality test")]
    NotPrime(u64),
    #[error(
        "valuation {valuation} is negative; the constant digit is defined only on p-adic integers"
    )]
    NotIntegral { valuation: i64 },
    #[error("requested precision {requested} does not exceed the valuation {valuation}; no digit would be stored")]
    PrecisionTooLow { requested: i64, valuation: i64 },
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("no significant digits are known at the working precision")]
    PrecisionExhausted,
    #[error("pair source ended at certified precision {reached} before reaching {requested}")]
    SourceExhausted { requested: i64, reached: i64 },
    #[error("orbit did not reach 0 or -p within {cap} steps; retry with a larger cap")]
    OrbitNotTerminated { cap: usize, expansion: CFExpansion },
    #[error("empty continued fraction input")]
    EmptyInput,
    #[error("{0} is not in Z[1/p]: its denominator has a prime factor other than p")]
    NotDyadic(String),
    #[error("invalid continued fraction data: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    ParseError(String),
}
