use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is below the supported range (p >= 5)")]
    TooSmall(i64),
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },
    #[error("binomial top {n} outside [0, {p})")]
    TopOutOfRange { n: i64, p: u64 },

    #[error("denominator (k + {offset}) vanishes at unexcluded k = {k}")]
    ZeroDenominator { offset: u64, k: u64 },
    #[error("invalid sum: {0}")]
    InvalidSpec(String),

    #[error("offset must be nonzero")]
    OffsetZero,
    #[error("offsets must differ (got {0} twice)")]
    EqualOffsets(u64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("cannot convert to product form: exponent {0} equals p - 1")]
    ConversionInvalid(i64),

    #[error("offsets must be pairwise distinct (got {0} twice)")]
    DuplicateOffsets(u64),
    #[error("Newton recursion needs index < p (asked for {r_max} with p = {p})")]
    IndexNotInvertible { r_max: usize, p: u64 },
    #[error("scaling pivot b_(n-1) is zero")]
    ZeroPivot,

    #[error("polynomials over different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),

    #[error("range violation: {0}")]
    RangeViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
    #[error("strategy does not apply: {0}")]
    StrategyInapplicable(String),
    #[error("strategies disagree: {0}")]
    Disagreement(String),
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
