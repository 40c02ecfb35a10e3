use thiserror::Error;

/// Errors raised by the exact and numeric routines of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be nonzero")]
    ZeroInput,

    #[error("{0} is divisible by 1+i")]
    EvenInput(String),

    #[error("factorization of {0} exceeded the effort bound")]
    FactorizationLimit(String),

    #[error("{0} is not a Gaussian prime")]
    NotPrime(String),

    #[error("{alpha} is not coprime to {modulus}")]
    NotCoprime { alpha: String, modulus: String },

    #[error("modulus {0} is even")]
    EvenModulus(String),

    #[error("reciprocity precondition violated at {0}")]
    ReciprocityPreconditionViolated(String),

    #[error("no reduction-table row matches digits {0}")]
    TableMiss(String),

    #[error("the place above 2 is not supported here")]
    EvenPlace,

    #[error("E_{d} has bad reduction at {place}")]
    BadReduction { d: String, place: String },

    #[error("E_{d} has good reduction at {place}")]
    GoodReduction { d: String, place: String },

    #[error("{what} = {value} exceeds the configured cap {cap}")]
    EffortBound { what: &'static str, value: String, cap: String },

    #[error("search exhausted; largest norm tried {largest_norm}")]
    SearchExhausted { largest_norm: String },

    #[error("local root number at 1+i is not available: E_{d} has bad reduction at 2")]
    UnsupportedEvenBadReduction { d: String },

    #[error("congruence system is not admissible: {0}")]
    InadmissibleSystem(String),

    #[error("value {0} does not snap to the expected coset")]
    Unsnapped(String),

    #[error("{0}")]
    ShapeViolation(String),

    #[error("cannot parse {0:?} as a Gaussian integer")]
    Parse(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
