use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: value {value:e}, estimate {error_estimate:e} after {subdivisions} subdivisions")]
    NonConvergent {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },
    #[error("declared tail growth tau^{exponent} is not integrable against tau^-(1+{sigma})")]
    DivergentTail { exponent: f64, sigma: f64 },
    #[error("singularity of exponent {exponent} at {at} is not integrable")]
    DivergentSingularity { at: f64, exponent: f64 },
    #[error("fractional order {0} outside (1/2, 1)")]
    InvalidOrder(f64),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid match radius: {0}")]
    InvalidMatchRadius(String),
    #[error("profile does not satisfy the hypotheses of the {0} representation")]
    IneligibleProfile(String),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("no sign change found for {0}")]
    BracketNotFound(String),
}

impl Error {
    pub fn is_non_convergent(&self) -> bool {
        matches!(self, Error::NonConvergent { .. })
    }
}
