use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    InvalidParams(String),

    #[error("field of order {p}^{degree} is too large for table arithmetic")]
    FieldTooLarge { p: u32, degree: u32 },

    #[error("inversion of zero")]
    DivisionByZero,

    #[error("{d} does not divide the extension degree {n}")]
    NotADivisor { d: u32, n: u32 },

    #[error("element coordinates are malformed: {0}")]
    BadCoordinates(String),

    #[error("polynomial is not in standard form")]
    NotStandardForm,

    #[error("the zero polynomial has no standard form")]
    ZeroPolynomial,

    #[error("family constraint violated: {0}")]
    Constraint(String),

    #[error("enumeration budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("no standardization available: {0}")]
    NoStandardization(String),

    #[error("census disagreement: {0}")]
    Disagreement(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
