use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("modulus polynomial is reducible over the prime field")]
    ReducibleModulus,
    #[error("modulus does not encode a monic polynomial of degree {0}")]
    DegreeMismatch(u32),
    #[error("field of order {0} exceeds the supported maximum 2^16")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("element has no square root")]
    NoRoot,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("linear system has no solution")]
    NoSolution,
    #[error("generator matrix is zero")]
    ZeroMatrix,
    #[error("dual of the full space is the zero code")]
    FullSpaceDual,

    #[error("invalid GRS parameters: {0}")]
    InvalidParams(String),
    #[error("no codeword within the decoding radius")]
    DecodeFailure,
    #[error("code is not a generalized Reed-Solomon code")]
    NotGrs,

    #[error("invalid dimensions n={n} k={k}: need 1 <= k < n <= q")]
    InvalidDimensions { n: usize, k: usize },
    #[error("key generation resampling exhausted after {0} attempts")]
    ResampleExhausted(usize),
    #[error("no guess decrypts the ciphertext")]
    DecryptionFailure,

    #[error("trial budget of {0} exceeded")]
    TrialBudgetExceeded(u64),
    #[error("attack not applicable at n={n} k={k}")]
    NotApplicable { n: usize, k: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
