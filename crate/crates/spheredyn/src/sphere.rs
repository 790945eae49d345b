//! Points on the unit sphere, tangent vectors, and whole-system states.
//!
//! A state of the n-sphere system is the list of base points `q_i`
//! together with one companion 3-vector per body: the velocity `qdot_i`,
//! the angular velocity `omega_i`, or one of the two conjugate momenta.
//! All four companions live in the tangent plane at their base point,
//! so validity always means the same two things: unit norm of `q_i` and
//! tangency of the companion.

use crate::error::DynamicsError;
use crate::so3::{hat, Vec3};
use crate::tol;

/// Which companion vector a [`SystemState`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Sphere velocity `qdot_i`.
    Velocity,
    /// Angular velocity `omega_i = q_i cross qdot_i`.
    Omega,
    /// Momentum conjugate to `qdot_i`.
    MomentumMu,
    /// Momentum conjugate to `omega_i`.
    MomentumPi,
}

impl Representation {
    pub fn label(&self) -> &'static str {
        match self {
            Representation::Velocity => "velocity",
            Representation::Omega => "omega",
            Representation::MomentumMu => "momentum-mu",
            Representation::MomentumPi => "momentum-pi",
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Which invariant a [`StateViolation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    UnitNorm,
    Tangency,
}

/// One invariant violation found by [`SystemState::violations`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateViolation {
    pub index: usize,
    pub kind: ViolationKind,
    pub magnitude: f64,
}

/// Unit vector on the two-sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    /// Accept `v` if its norm is within [`tol::UNIT_NORM`] of one.
    pub fn new(v: Vec3) -> Result<Self, DynamicsError> {
        Self::with_tol(v, tol::UNIT_NORM)
    }

    /// Accept `v` if its norm is within `norm_tol` of one.
    pub fn with_tol(v: Vec3, norm_tol: f64) -> Result<Self, DynamicsError> {
        let err = (v.norm() - 1.0).abs();
        if err > norm_tol {
            return Err(DynamicsError::TangencyViolation {
                index: 0,
                norm_error: err,
                tangency_error: 0.0,
                time: None,
            });
        }
        Ok(SpherePoint(v))
    }

    /// Rescale `v` onto the sphere; rejects near-zero input where the
    /// direction is meaningless.
    pub fn renormalized(v: Vec3) -> Result<Self, DynamicsError> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(DynamicsError::invalid(format!(
                "cannot renormalize a vector of norm {n:.3e}"
            )));
        }
        Ok(SpherePoint(v / n))
    }

    /// Wrap without checking. For callers that have already established
    /// the invariant or deliberately track drifted data.
    pub fn new_unchecked(v: Vec3) -> Self {
        SpherePoint(v)
    }

    pub fn coords(&self) -> Vec3 {
        self.0
    }
}

/// Vector in the tangent plane of a sphere point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    at: SpherePoint,
    v: Vec3,
}

impl TangentVector {
    /// Accept `v` if `|q . v| <= tol * max(1, ||v||)`.
    pub fn new(at: SpherePoint, v: Vec3) -> Result<Self, DynamicsError> {
        let err = tangency_error(&at.coords(), &v);
        if err > tol::TANGENCY {
            return Err(DynamicsError::TangencyViolation {
                index: 0,
                norm_error: 0.0,
                tangency_error: err,
                time: None,
            });
        }
        Ok(TangentVector { at, v })
    }

    /// Project `v` onto the tangent plane at `at`.
    pub fn projected(at: SpherePoint, v: Vec3) -> Self {
        let q = at.coords();
        TangentVector {
            at,
            v: project_tangent(&q, &v),
        }
    }

    pub fn base(&self) -> SpherePoint {
        self.at
    }

    pub fn vector(&self) -> Vec3 {
        self.v
    }
}

/// Orthogonal projection `(I - q q^T) v` onto the tangent plane at `q`.
#[inline]
pub fn project_tangent(q: &Vec3, v: &Vec3) -> Vec3 {
    v - q * q.dot(v)
}

/// Angular velocity from sphere velocity: `omega = q cross qdot`.
///
/// Inverse of [`qdot_from_omega`] on tangent inputs; both round-trip to
/// rounding level.
#[inline]
pub fn omega_from_qdot(q: &Vec3, qdot: &Vec3) -> Vec3 {
    q.cross(qdot)
}

/// Sphere velocity from angular velocity: `qdot = omega cross q`.
#[inline]
pub fn qdot_from_omega(q: &Vec3, omega: &Vec3) -> Vec3 {
    omega.cross(q)
}

/// Rotate `q` by the rotation vector `a` (axis times angle).
///
/// Uses the closed-form Rodrigues rotation, switching to its quadratic
/// Taylor truncation below an angle of 1e-8 where the trigonometric
/// coefficients lose accuracy. The result is renormalized so the output
/// is a unit vector exactly to rounding.
pub fn exp_rotate(a: &Vec3, q: &Vec3) -> Vec3 {
    let theta = a.norm();
    if theta == 0.0 {
        return *q;
    }
    let s = hat(a);
    let rotated = if theta < 1e-8 {
        q + s * q + s * (s * q) / 2.0
    } else {
        let (sin_t, cos_t) = theta.sin_cos();
        q + (sin_t / theta) * (s * q) + ((1.0 - cos_t) / (theta * theta)) * (s * (s * q))
    };
    rotated / rotated.norm()
}

/// Normalized tangency defect `|q . v| / max(1, ||v||)`.
#[inline]
pub fn tangency_error(q: &Vec3, v: &Vec3) -> f64 {
    q.dot(v).abs() / v.norm().max(1.0)
}

/// Full state of the n-body system: base points, companion vectors in
/// one representation, and the clock.
///
/// The data is stored as plain 3-vectors so integrators and
/// finite-difference probes can hold slightly off-manifold values;
/// the constructors and [`SystemState::violations`] supply the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    q: Vec<Vec3>,
    w: Vec<Vec3>,
    rep: Representation,
    time: f64,
}

impl SystemState {
    /// Build a state and verify every invariant at the default
    /// tolerances, reporting the first offending body otherwise.
    pub fn new(
        q: Vec<Vec3>,
        w: Vec<Vec3>,
        rep: Representation,
        time: f64,
    ) -> Result<Self, DynamicsError> {
        Self::with_tol(q, w, rep, time, tol::UNIT_NORM, tol::TANGENCY)
    }

    /// [`SystemState::new`] with caller-chosen tolerances.
    pub fn with_tol(
        q: Vec<Vec3>,
        w: Vec<Vec3>,
        rep: Representation,
        time: f64,
        norm_tol: f64,
        tangency_tol: f64,
    ) -> Result<Self, DynamicsError> {
        let state = Self::new_unchecked(q, w, rep, time);
        match state.violations(norm_tol, tangency_tol).first() {
            None => Ok(state),
            Some(v) => Err(DynamicsError::TangencyViolation {
                index: v.index,
                norm_error: state.norm_error(v.index),
                tangency_error: state.tangency_error(v.index),
                time: Some(time),
            }),
        }
    }

    /// Build a state by force: renormalize every base point and project
    /// every companion onto the resulting tangent plane.
    pub fn repaired(
        q: Vec<Vec3>,
        w: Vec<Vec3>,
        rep: Representation,
        time: f64,
    ) -> Result<Self, DynamicsError> {
        if q.len() != w.len() {
            return Err(DynamicsError::invalid(format!(
                "{} base points but {} companion vectors",
                q.len(),
                w.len()
            )));
        }
        let mut qs = Vec::with_capacity(q.len());
        let mut ws = Vec::with_capacity(w.len());
        for (qi, wi) in q.into_iter().zip(w) {
            let p = SpherePoint::renormalized(qi)?.coords();
            ws.push(project_tangent(&p, &wi));
            qs.push(p);
        }
        Ok(Self::new_unchecked(qs, ws, rep, time))
    }

    /// Wrap raw data without validation. `q` and `w` must be the same
    /// length.
    pub fn new_unchecked(q: Vec<Vec3>, w: Vec<Vec3>, rep: Representation, time: f64) -> Self {
        assert_eq!(q.len(), w.len(), "base point / companion count mismatch");
        SystemState { q, w, rep, time }
    }

    /// Build from checked geometry types; cannot fail validation.
    pub fn from_parts(parts: Vec<TangentVector>, rep: Representation, time: f64) -> Self {
        let q = parts.iter().map(|t| t.base().coords()).collect();
        let w = parts.iter().map(|t| t.vector()).collect();
        Self::new_unchecked(q, w, rep, time)
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn q(&self) -> &[Vec3] {
        &self.q
    }

    pub fn w(&self) -> &[Vec3] {
        &self.w
    }

    pub fn rep(&self) -> Representation {
        self.rep
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Same data re-labelled with a new companion meaning. Used by the
    /// representation converters once they have transformed `w`.
    pub(crate) fn relabel(&self, w: Vec<Vec3>, rep: Representation) -> SystemState {
        SystemState {
            q: self.q.clone(),
            w,
            rep,
            time: self.time,
        }
    }

    fn norm_error(&self, i: usize) -> f64 {
        (self.q[i].norm() - 1.0).abs()
    }

    fn tangency_error(&self, i: usize) -> f64 {
        tangency_error(&self.q[i], &self.w[i])
    }

    /// Every invariant violation in the state, in body order.
    pub fn violations(&self, norm_tol: f64, tangency_tol: f64) -> Vec<StateViolation> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            let ne = self.norm_error(i);
            if ne > norm_tol {
                out.push(StateViolation {
                    index: i,
                    kind: ViolationKind::UnitNorm,
                    magnitude: ne,
                });
            }
            let te = self.tangency_error(i);
            if te > tangency_tol {
                out.push(StateViolation {
                    index: i,
                    kind: ViolationKind::Tangency,
                    magnitude: te,
                });
            }
        }
        out
    }

    /// Worst unit-norm defect over all bodies (zero for empty systems).
    pub fn max_norm_error(&self) -> f64 {
        (0..self.n()).map(|i| self.norm_error(i)).fold(0.0, f64::max)
    }

    /// Worst tangency defect over all bodies.
    pub fn max_tangency_error(&self) -> f64 {
        (0..self.n())
            .map(|i| self.tangency_error(i))
            .fold(0.0, f64::max)
    }

    /// Renormalize all base points and re-project all companions,
    /// in place. This is the `project` repair step of the integrators.
    pub fn repair_project(&mut self) {
        for i in 0..self.q.len() {
            let n = self.q[i].norm();
            self.q[i] /= n;
            self.w[i] = project_tangent(&self.q[i], &self.w[i]);
        }
    }
}

/// Convert between the two kinematic representations without a model.
///
/// Velocity and angular velocity are related pointwise by the hat map;
/// momentum representations need the inertia and live in the
/// Hamiltonian module's converter.
pub fn convert_kinematic(
    state: &SystemState,
    target: Representation,
) -> Result<SystemState, DynamicsError> {
    match (state.rep(), target) {
        (a, b) if a == b => Ok(state.clone()),
        (Representation::Velocity, Representation::Omega) => {
            let w = state
                .q()
                .iter()
                .zip(state.w())
                .map(|(q, v)| omega_from_qdot(q, v))
                .collect();
            Ok(state.relabel(w, target))
        }
        (Representation::Omega, Representation::Velocity) => {
            let w = state
                .q()
                .iter()
                .zip(state.w())
                .map(|(q, o)| qdot_from_omega(q, o))
                .collect();
            Ok(state.relabel(w, target))
        }
        (got, expected) => Err(DynamicsError::WrongRepresentation {
            expected: expected.label(),
            got: got.label(),
        }),
    }
}
