//! Error type shared by the geometry checks, evaluators and integrators.

use thiserror::Error;

/// Everything that can go wrong while validating states, evaluating
/// dynamics or integrating trajectories.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    /// The inverse hat map was handed a matrix with a symmetric part.
    #[error("matrix is not skew-symmetric: max |M + M^T| entry {asymmetry:.3e} exceeds {limit:.3e}")]
    NotSkewSymmetric { asymmetry: f64, limit: f64 },

    /// A state violated the unit-norm or tangency invariant.
    #[error("state invariant violated at body {index}{}: norm error {norm_error:.3e}, tangency error {tangency_error:.3e}", fmt_time(.time))]
    TangencyViolation {
        index: usize,
        norm_error: f64,
        tangency_error: f64,
        time: Option<f64>,
    },

    /// The assembled kinetic system is numerically singular.
    #[error("kinetic system numerically singular{}: reciprocal condition estimate {rcond:.3e}", fmt_time(.time))]
    SingularInertia { rcond: f64, time: Option<f64> },

    /// A state component left the admissible region during integration.
    #[error("trajectory diverged at t = {time}: component magnitude {magnitude:.3e}")]
    DivergenceDetected { time: f64, magnitude: f64 },

    /// A model or integrator was constructed from unusable parameters.
    #[error("invalid parameters: {reason}")]
    InvalidParams { reason: String },

    /// A quadrature or trajectory operation needs more samples.
    #[error("insufficient samples: got {got}, need at least {needed}")]
    InsufficientSamples { got: usize, needed: usize },

    /// A variation curve does not fit the trajectory it perturbs.
    #[error("variation curve mismatch: {reason}")]
    CurveMismatch { reason: String },

    /// A state arrived in a different representation than the operation
    /// is defined for.
    #[error("state is in the {got} representation, expected {expected}")]
    WrongRepresentation {
        expected: &'static str,
        got: &'static str,
    },
}

fn fmt_time(time: &Option<f64>) -> String {
    match time {
        Some(t) => format!(" at t = {t}"),
        None => String::new(),
    }
}

impl DynamicsError {
    /// Attach a timestamp to errors raised mid-integration.
    pub(crate) fn at_time(self, t: f64) -> Self {
        match self {
            DynamicsError::TangencyViolation {
                index,
                norm_error,
                tangency_error,
                ..
            } => DynamicsError::TangencyViolation {
                index,
                norm_error,
                tangency_error,
                time: Some(t),
            },
            DynamicsError::SingularInertia { rcond, .. } => DynamicsError::SingularInertia {
                rcond,
                time: Some(t),
            },
            other => other,
        }
    }

    pub(crate) fn invalid(reason: impl Into<String>) -> Self {
        DynamicsError::InvalidParams {
            reason: reason.into(),
        }
    }
}
