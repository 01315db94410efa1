use num_bigint::BigUint;
use thiserror::Error;

use crate::phi::PhiError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Phi(#[from] PhiError),

    #[error("{value} is outside the domain {domain}")]
    Domain { value: String, domain: &'static str },

    #[error("digit {index} is {found}, but must be at least {required}")]
    InvalidDigit { index: usize, required: BigUint, found: BigUint },

    #[error("a cylinder base needs at least one digit")]
    EmptyBase,

    #[error("child digit {child} is below the minimum {minimum}")]
    ChildOutOfRange { child: BigUint, minimum: BigUint },

    #[error("cannot compare digit sequences from different sides")]
    SideMismatch,

    #[error("cannot compare digit sequences generated by different programs")]
    ProgramMismatch,

    #[error("requested depth {requested} exceeds the configured cap {cap}")]
    DepthLimit { requested: usize, cap: usize },

    #[error("digit {position} has {bits} bits, above the {limit_bits}-bit guard")]
    DigitTooLarge { position: usize, bits: u64, limit_bits: u64 },

    #[error("no feasible base with all digits in the restriction set at level {level}")]
    EmptyRestriction { level: usize },

    #[error("enumeration exceeded the budget of {budget} cylinders")]
    EnumerationBudget { budget: u64 },

    #[error("sample {sample} still under-resolved at {bits} bits (cap {cap})")]
    PrecisionExhausted { sample: u64, bits: u64, cap: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a rational of the form num/den: {0:?}")]
    RationalSyntax(String),
}

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Domain,
    Precision,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain { .. } => ErrorClass::Domain,
            Error::DepthLimit { .. }
            | Error::DigitTooLarge { .. }
            | Error::EnumerationBudget { .. }
            | Error::PrecisionExhausted { .. } => ErrorClass::Precision,
            _ => ErrorClass::Validation,
        }
    }

    pub(crate) fn domain(value: impl ToString, domain: &'static str) -> Self {
        Error::Domain { value: value.to_string(), domain }
    }
}
