//! Numerical tolerances used throughout the library.
//!
//! Everything here is a named constant so that tests, the validators and
//! the CLI agree on one set of numbers. f64 machine epsilon is about
//! 2.2e-16; each tolerance leaves headroom above that for the operation
//! counts involved, and the comments record the reasoning.

/// Allowed unit-norm defect `| ||q|| - 1 |` of a valid sphere point.
///
/// Constraint drift of a projected fixed-step run stays near rounding
/// level; 1e-9 leaves several orders of headroom over accumulated
/// rounding while still catching genuine constraint loss immediately.
pub const UNIT_NORM: f64 = 1e-9;

/// Allowed tangency defect `|q . w| / max(1, ||w||)` of a valid
/// companion vector (velocity, angular velocity or momentum).
///
/// Scaled by the companion magnitude so fast states are not penalized;
/// same headroom argument as [`UNIT_NORM`].
pub const TANGENCY: f64 = 1e-9;

/// Max absolute entry of `M + M^T` accepted by the inverse hat map.
///
/// Skew matrices produced by `hat` are exact; anything built from a few
/// arithmetic operations on O(1) data stays within a few ulp. 1e-12 is
/// loose enough for that and four orders stricter than state validation.
pub const SKEW_ASYMMETRY: f64 = 1e-12;

/// Tolerance for the algebraic hat-map identities over O(10) inputs.
///
/// The identities involve products of three inputs of magnitude up to
/// 10, so intermediate values reach O(1e3) and rounding O(1e-13).
pub const KERNEL_IDENTITY: f64 = 1e-10;

/// Gross-invalidity guard applied by the dynamics evaluators.
///
/// The evaluators extend smoothly off the constraint manifold, and the
/// integrators rely on that for their internal stage states, so the
/// public entry points only reject states that are unmistakably broken
/// rather than slightly drifted.
pub const EVALUATOR_GUARD: f64 = 1e-3;

/// Reciprocal-condition floor below which an assembled kinetic system
/// is reported as singular instead of solved.
pub const RCOND_FLOOR: f64 = 1e-14;

/// Step for the fourth-order central stencil that produces the
/// configuration gradients of the Hamiltonians.
///
/// The five-point quotient has truncation error h^4/30 times a fifth
/// derivative and rounding error near 1e-16/h per component. At 1e-4
/// the rounding part sits at a few 1e-12 and the truncation part is
/// far below it; a plain three-point quotient at any step leaves a
/// gradient bias around 1e-10 that accumulates visibly over long
/// momentum-form integrations.
pub const FD_STEP: f64 = 1e-4;

/// Central-difference step for the model-gradient fallbacks (inertia
/// entries and potential), which are plain three-point quotients.
pub const MODEL_FD_STEP: f64 = 1e-6;

/// Component magnitude beyond which an integration is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e8;

/// Default parameter step for variational difference quotients.
///
/// The action is perturbed through an exact exponential in epsilon, so
/// the central quotient truncates at O(eps^2) = 1e-10 while rounding in
/// the quotient stays near 1e-16 / eps = 1e-11.
pub const VARIATION_EPSILON: f64 = 1e-5;
