use thiserror::Error;

/// Every failure mode surfaced by the library.
///
/// Randomized algorithms report `VerificationFailed`, `LiftError` or
/// `Inconclusive` instead of returning an unverified answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p - 1 = {0} has a prime factor {1} too large for discrete logarithms")]
    NotSmooth(u64, u64),
    #[error("invalid factorization of p - 1")]
    BadFactorization,
    #[error("not an l-th power")]
    NotAPower,
    #[error("interpolation points are not pairwise distinct")]
    DuplicatePoints,
    #[error("no rational reconstruction within the degree bounds")]
    NoReconstruction,
    #[error("singular transposed Vandermonde system")]
    SingularSystem,
    #[error("Kronecker encoding overflows the multiplicative group order")]
    KroneckerOverflow,
    #[error("sparse interpolation failed: {0}")]
    InterpolationFailed(&'static str),
    #[error("not divisible")]
    NotDivisible,
    #[error("term budget exceeded during adaptive interpolation")]
    TermBudgetExceeded,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero substituted for a variable with negative exponents")]
    ZeroSubstitutionForLaurent,
    #[error("negative exponent where a polynomial is required")]
    NegativeExponent,
    #[error("variable count mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("unsupported input: {0}")]
    Unsupported(&'static str),
    #[error("Hensel lifting failed: {0}")]
    LiftFailed(&'static str),
    #[error("rational reconstruction of the lifted factor failed")]
    ReconstructFailed,
    #[error("no admissible shift found")]
    DegenerateShift,
    #[error("gcd normalization anchor vanished")]
    NormalizationFailed,
    #[error("verification failed: {0}")]
    VerificationFailed(&'static str),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(&'static str),
    #[error("lifting error: {0}")]
    LiftError(&'static str),
    #[error("inconclusive: {0}")]
    Inconclusive(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown bench suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
