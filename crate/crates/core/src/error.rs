use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the simplex, exponential-family and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("composition has a zero part at index {index}")]
    BoundaryPoint { index: usize },

    #[error("vector is not on the simplex: {0}")]
    NotOnSimplex(String),

    #[error("tangent vector components sum to {sum:e}, expected 0")]
    NotInTangentPlane { sum: f64 },

    #[error("weight {value} at index {index} must be positive")]
    InvalidWeight { index: usize, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("divergence is infinite: part {index} is positive in p but zero in q")]
    InfiniteDivergence { index: usize },

    #[error("outcome has probability zero: count at index {index} is positive where q is zero")]
    ImpossibleOutcome { index: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("Monte Carlo oracle starved: all {replicates} draws contained a zero count")]
    OracleStarved { replicates: usize },
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionError { expected, got })
    }
}
