use thiserror::Error;

/// Errors raised by the arithmetic and dynamics routines.
///
/// Verdicts such as "non-integral" or "polygons differ" are not errors; they
/// are carried by the report types. Everything here is a precondition,
/// precision, or input failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("coefficient rings differ: {0}")]
    RingMismatch(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("precision budget violated: need N >= {needed}, have N = {have}")]
    PrecisionBudget { needed: u32, have: u32 },

    #[error("linear coefficient is not a unit")]
    NonUnitLinear,

    #[error("coefficient at index {0} has negative valuation")]
    NegativeValuation(usize),

    #[error("Weierstrass degree undetermined: no unit coefficient up to x^{0}")]
    WidegUndetermined(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("convergence certificate fails: {0}")]
    Convergence(String),

    #[error("series is not in the Nottingham group (linear coefficient {0} != 1)")]
    NotNottingham(u64),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code used in JSON error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::InvalidContext(_) => "invalid_context",
            Error::RingMismatch(_) => "ring_mismatch",
            Error::DivisionByZero => "division_by_zero",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::PrecisionBudget { .. } => "precision_budget",
            Error::NonUnitLinear => "non_unit_linear",
            Error::NegativeValuation(_) => "negative_valuation",
            Error::WidegUndetermined(_) => "wideg_undetermined",
            Error::Precondition(_) => "precondition",
            Error::Convergence(_) => "convergence",
            Error::NotNottingham(_) => "not_nottingham",
            Error::Parse(_) => "malformed_input",
        }
    }

    /// True for malformed-input errors, as opposed to failed preconditions.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidContext(_) | Error::NotPrime(_) | Error::RingMismatch(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
