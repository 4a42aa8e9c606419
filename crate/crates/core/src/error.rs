use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeometryError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("chart dimension must be odd and at least 3, got {0}")]
    BadDimension(usize),
    #[error("coordinate {0} is not finite")]
    NonFiniteCoordinate(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation of {0} produced a non-finite value")]
    NonFinite(&'static str),
    #[error("point lies outside the chart domain")]
    OutsideDomain,
    #[error("not a contact form here: lambda ^ (d lambda)^n coefficient is {0:e}")]
    NotContact(f64),
    #[error("J does not square to -Pi: residual {0:e}")]
    InvalidJ(f64),
    #[error("J is not compatible with d lambda: residual {residual:e}, min d lambda(Y, JY) = {positivity:e}")]
    IncompatibleJ { residual: f64, positivity: f64 },
    #[error("frame seeds are rank deficient at this point")]
    RankDeficientSeeds,
    #[error("map does not preserve lambda: residual {0:e}")]
    NotStrict(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
