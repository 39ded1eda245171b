use thiserror::Error;

/// Errors produced by the arithmetic, congruence and root-finding routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("operands live in different fields: Q_{0} and Q_{1}")]
    PrimeMismatch(u64, u64),

    #[error("operation is undefined for zero")]
    ZeroInput,

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("need at least {needed} digits, only {available} are known")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("cannot parse value `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("{a} is not coprime to the modulus {m}")]
    NotCoprime { a: i64, m: u64 },

    #[error("{r} is not a primitive root modulo {m}")]
    NotPrimitiveRoot { r: i64, m: u64 },

    #[error("the unit group modulo {0} is not cyclic")]
    NonCyclicModulus(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// Criteria and digit lifting disagree. Signals a bug, never a user error.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
