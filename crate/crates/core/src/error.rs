use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} is below 3")]
    FieldTooSmall(u64),
    #[error("field order {0} exceeds the supported maximum of 256")]
    FieldTooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("element rep {rep} out of range for GF({q})")]
    RepOutOfRange { rep: u32, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("all-zero coordinate vector")]
    ZeroVector,
    #[error("the two points coincide")]
    EqualPoints,
    #[error("unsupported projective dimension {0}")]
    UnsupportedDimension(usize),
    #[error("plane basis does not span a plane")]
    DegenerateBasis,
    #[error("zero form")]
    ZeroForm,
    #[error("operation not supported for a {0} surface")]
    UnsupportedSurface(&'static str),
    #[error("{what}: {count} exceeds the limit {limit} (use an explicit override)")]
    SizeGuard { what: &'static str, count: u128, limit: u128 },
    #[error("fewer than three distinct nonzero weights")]
    ShortSpectrum,
    #[error("the two quadrics share a plane component")]
    SharedPlane,
    #[error("the two forms define the same quadric")]
    SameQuadric,
    #[error("form vanishes on every point of the surface")]
    KernelForm,
    #[error("no codeword of weight {0}")]
    TierAbsent(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
