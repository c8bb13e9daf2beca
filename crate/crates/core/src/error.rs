use thiserror::Error;

/// Errors raised by the library.
///
/// Everything except [`Error::Internal`] is a validation failure of the
/// caller's input; the CLI maps those to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("order must be positive and finite, got {0}")]
    InvalidOrder(f64),

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error(
        "integer order {rho} requires a vanishing rho-th moment, got {re:+.3e}{im:+.3e}i (|m| = {abs:.3e})"
    )]
    MomentViolation { rho: f64, re: f64, im: f64, abs: f64 },

    #[error("grid resolution must be at least {min}, got {got}")]
    ResolutionTooSmall { got: usize, min: usize },

    #[error("operation requires an integer order, got {0}")]
    NonIntegerOrder(f64),

    #[error("function is not trigonometrically convex (worst criterion value {violation:.3e})")]
    NotTrigConvex { violation: f64 },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("empty point set")]
    EmptySet,

    #[error("covering construction failed at gap {gap:.6} (bound {bound:.6})")]
    CoverFailed { gap: f64, bound: f64 },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error stems from bad input rather than a bug.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::CoverFailed { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
