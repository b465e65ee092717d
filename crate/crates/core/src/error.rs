use thiserror::Error;

use crate::analysis::FringeFit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("geometry does not fit the grid: {0}")]
    GeometryDoesNotFit(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "sampling violation: {fraction:.3e} of the spectral power lies beyond the \
         band limit {limit:.4e} 1/m (tolerance {tolerance:.1e}); enlarge the grid or shorten the distance"
    )]
    SamplingViolation {
        fraction: f64,
        limit: f64,
        tolerance: f64,
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("fringe fit did not converge after {iterations} iterations")]
    FitDidNotConverge {
        iterations: usize,
        best: Box<FringeFit>,
    },

    #[error("fringe fit needs at least {required} fringe periods, found about {found:.1}")]
    TooFewFringes { required: f64, found: f64 },

    #[error(
        "imaging condition violated: 1/{object:.4} + 1/{image:.4} differs from 1/{focal:.4} \
         by more than the tolerance"
    )]
    ImagingCondition { object: f64, image: f64, focal: f64 },

    #[error("no interference nodes found in the grid-plane profile")]
    NoNodes,
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Fails with `InvalidParameter` unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in [0, 1], got {value}")))
    }
}
