use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic 2 is not supported")]
    CharTwoUnsupported,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("field of order {0} exceeds the table limit")]
    FieldTooLarge(u64),
    #[error("field element out of range")]
    InvalidElement,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("zero element")]
    ZeroElement,
    #[error("s = {0} is outside the convergence region")]
    OutsideConvergenceRegion(i64),
    #[error("invalid curve descriptor: {0}")]
    InvalidCurve(String),
    #[error("binary form has degree {found}, expected {expected}")]
    FormDegree { expected: usize, found: usize },
    #[error("non-reduced fiber over {0}")]
    NonReducedFiber(String),
    #[error("singular total space: {0}")]
    SingularTotalSpace(String),
    #[error("class does not belong to this bundle: {0}")]
    BundleMismatch(String),
    #[error("euler characteristic is not integral for this class")]
    ParityViolation,
    #[error("{0} is not a split fiber")]
    NotASplitFiber(String),
    #[error("empty space: {0}")]
    EmptySpace(String),
    #[error("zero section")]
    ZeroSection,
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    EnumerationBudgetExceeded { needed: u128, budget: u64 },
    #[error("odd fiber degree {0} is not supported on this bundle")]
    OddDegreeUnsupported(i64),
    #[error("b out of range at {point}: {value} not in [-{bound}, {bound}]")]
    BOutOfRange { point: String, value: i64, bound: i64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("config error at {path}: {reason}")]
    ConfigError { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
