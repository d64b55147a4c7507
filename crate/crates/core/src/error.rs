//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by validation and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented domain.
    #[error("invalid parameter `{name}`: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// An input that must be finite is NaN or infinite.
    #[error("non-finite input `{name}` (got {value})")]
    NonFinite { name: &'static str, value: f64 },

    /// The disclosed interval is too short relative to the signal noise scale.
    #[error("degenerate interval [{v_lo}, {v_hi}]: length must exceed {min_length:e}")]
    DegenerateRange {
        v_lo: f64,
        v_hi: f64,
        min_length: f64,
    },

    /// A price (or other value) lies outside the open image of the price map.
    #[error("value {value} is outside the attainable open interval ({v_lo}, {v_hi})")]
    OutOfImage { value: f64, v_lo: f64, v_hi: f64 },

    /// A grid search found its best point on the bracket boundary.
    #[error("optimum at bracket edge of [{lo}, {hi}]; bracket too small")]
    BracketEdge { lo: f64, hi: f64 },

    /// An iterative routine exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
