use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical pipeline.
///
/// Every variant maps to exit code 2 in the command-line driver; configuration
/// problems are reported separately by the driver itself.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("potential evaluated within {distance:.3e} of a pole at z = {z}")]
    PoleProximity { z: Complex64, distance: f64 },

    #[error("rotated contour at angle {theta} through {center} crosses a singularity hull")]
    ContourViolation { center: f64, theta: f64 },

    #[error("quadrature not converged: doubling nodes changed values by {change:.3e}")]
    QuadratureNonConvergence { change: f64 },

    #[error("Newton iteration for the eikonal saddle diverged at q_n = {q}; use quadrature mode")]
    NewtonDivergence { q: f64 },

    #[error("eikonal Jacobian {jacobian:.3e} <= 0 at q_n = {q} (caustic crossed); use quadrature mode")]
    NegativeJacobian { q: f64, jacobian: f64 },

    #[error("hypergeometric series did not converge after {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("spectral tail bound {bound:.3e} exceeds tolerance {tolerance:.1e}")]
    TailBoundViolation { bound: f64, tolerance: f64 },

    #[error("Runge-Kutta step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("discrete orbit left |q| < 1e6 at slice {slice}")]
    Overflow { slice: usize },

    #[error("slice {n}: {source}")]
    AtSlice {
        n: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_slice(self, n: usize) -> Error {
        match self {
            e @ Error::AtSlice { .. } => e,
            e => Error::AtSlice { n, source: Box::new(e) },
        }
    }

    /// The innermost error with slice annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSlice { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
