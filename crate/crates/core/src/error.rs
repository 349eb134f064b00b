use thiserror::Error;

/// Errors raised by the library. Validation problems that should be listed
/// rather than thrown are collected in reports instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("composition of differentials is nonzero: {0}")]
    CompositionNonzero(String),

    #[error("degenerate alternating form (determinant is zero)")]
    DegenerateForm,

    #[error("alternating form has odd size {0}")]
    OddSize(usize),

    #[error("not an alternating matrix: {0}")]
    NotAlternating(String),

    #[error("subtorus failure: rank of the kernel lattice is {lattice_rank}, expected {expected}")]
    SubtorusFailure { lattice_rank: usize, expected: usize },

    #[error("zero covector where a nonzero one is required")]
    ZeroCovector,

    #[error("truncation mismatch: need order {needed}, got {got}")]
    TruncationMismatch { needed: usize, got: usize },

    #[error("truncation order {order} too small, need at least {minimum}")]
    TruncationTooSmall { order: usize, minimum: usize },

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("series is not divisible by hbar^{0}")]
    NotDivisible(usize),

    #[error("Poisson compatibility violated: H^T Pi H != 0")]
    Incompatible,

    #[error("the restricted series l(hbar)^0 vanishes, so t0 is infinite")]
    InfiniteT0,

    #[error("out of scope: {0}")]
    Scope(String),

    #[error("invalid filtered complex: {0}")]
    InvalidComplex(String),

    #[error("invalid input data: {0}")]
    Invalid(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
