use thiserror::Error;

/// Errors raised by the bound computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("test function is identically zero")]
    ZeroFunction,

    #[error("adaptive quadrature did not reach tolerance {tol:e} on [{a}, {b}]")]
    ToleranceNotReached { a: f64, b: f64, tol: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("malformed field record: {0}")]
    MalformedRecord(String),

    #[error("defining polynomial is not monic")]
    NonMonicPolynomial,

    #[error("field discriminant is zero")]
    ZeroDiscriminant,

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotReached { .. } | Error::NotPositiveDefinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
