use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("negative inflation radius")]
    NegativeRadius,

    #[error("parameter must be positive: {0}")]
    NonPositive(&'static str),

    #[error("irrational similarity ratio is unsupported in exact mode")]
    IrrationalRatio,

    #[error("system is not lattice")]
    Nonlattice,

    #[error("open set has no feasibility certificate")]
    Uncertified,

    #[error("generator is null (g = 0); the attractor is trivial")]
    NullGenerator,

    #[error("dimension enclosure does not lie strictly below 1")]
    DimensionNotBelowOne,

    #[error("generator component list is incomplete")]
    IncompleteComponents,

    #[error("tail bound {bound} exceeds requested accuracy {requested}")]
    TailBoundExceeded { bound: String, requested: String },

    #[error("neighbor graph is incomplete (cap reached); classification refused")]
    IncompleteGraph,

    #[error("digit data is not integral; use the He-Lau check instead")]
    NonIntegerDigits,

    #[error("enclosure contains zero; cannot divide")]
    DivisionByZero,

    #[error("logarithm of a non-positive enclosure")]
    NonPositiveLog,
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid { field: field.into(), reason: reason.into() }
    }
}
