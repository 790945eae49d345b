//! Euler-Lagrange dynamics in the two velocity-like representations.
//!
//! For a kinetic energy `1/2 sum_jk m_jk(q) qdot_j . qdot_k` minus a
//! potential `U(q)`, the equations of motion restricted to the sphere
//! product form a linear system in the accelerations. This module
//! assembles and solves that system for both the sphere-velocity
//! unknowns `qddot_i` and the angular-velocity unknowns `omegadot_i`,
//! and evaluates the configuration-derivative force terms that appear
//! when the inertia depends on `q`.

use crate::error::DynamicsError;
use crate::linsys;
use crate::model::{check_model, inertia_gradient, potential_gradient, ForceModel, QuadraticModel};
use crate::so3::{hat, Vec3};
use crate::sphere::{project_tangent, Representation, SystemState};
use crate::tol;

/// Accelerations solved from the assembled kinetic system, along with
/// the reciprocal-condition estimate of that system.
#[derive(Debug, Clone)]
pub struct AccelerationResult {
    pub accel: Vec<Vec3>,
    pub rcond: f64,
}

/// Kinetic / potential split of the energy at one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
}

impl EnergyBreakdown {
    /// Lagrangian `T - U`.
    pub fn lagrangian(&self) -> f64 {
        self.kinetic - self.potential
    }

    /// Total energy `T + U`.
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

fn guard_state(
    model: &dyn QuadraticModel,
    state: &SystemState,
    expected: Representation,
) -> Result<(), DynamicsError> {
    check_model(model)?;
    if state.rep() != expected {
        return Err(DynamicsError::WrongRepresentation {
            expected: expected.label(),
            got: state.rep().label(),
        });
    }
    if state.n() != model.n() {
        return Err(DynamicsError::invalid(format!(
            "state has {} bodies but the model has {}",
            state.n(),
            model.n()
        )));
    }
    if let Some(v) = state.violations(tol::EVALUATOR_GUARD, tol::EVALUATOR_GUARD).first() {
        return Err(DynamicsError::TangencyViolation {
            index: v.index,
            norm_error: (state.q()[v.index].norm() - 1.0).abs(),
            tangency_error: crate::sphere::tangency_error(&state.q()[v.index], &state.w()[v.index]),
            time: Some(state.time()),
        });
    }
    Ok(())
}

/// Inertia-rate matrix `mdot_ij = sum_w (d m_ij / d q_w) . qdot_w` and
/// the gradient tables it was built from.
fn inertia_rates(
    model: &dyn QuadraticModel,
    q: &[Vec3],
    qdot: &[Vec3],
) -> (Vec<crate::model::InertiaGradient>, Vec<Vec<f64>>) {
    let n = q.len();
    let grads: Vec<_> = (0..n).map(|w| inertia_gradient(model, q, w)).collect();
    let mut mdot = vec![vec![0.0; n]; n];
    for (i, row) in mdot.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..n).map(|w| grads[w].get(i, j).dot(&qdot[w])).sum();
        }
    }
    (grads, mdot)
}

fn eval_f_from_qdot(model: &dyn QuadraticModel, q: &[Vec3], qdot: &[Vec3]) -> Vec<Vec3> {
    let n = q.len();
    let (grads, mdot) = inertia_rates(model, q, qdot);
    (0..n)
        .map(|i| {
            let mut f = Vec3::zeros();
            for j in 0..n {
                f += mdot[i][j] * qdot[j];
            }
            for j in 0..n {
                for k in 0..n {
                    f -= 0.5 * qdot[j].dot(&qdot[k]) * grads[i].get(j, k);
                }
            }
            f
        })
        .collect()
}

/// Configuration-derivative force terms in the velocity representation:
/// `F_i = sum_j mdot_ij qdot_j - 1/2 d/dq_i (sum_jk qdot_j m_jk qdot_k)`.
///
/// Identically zero for constant inertia, with no finite-difference
/// noise when the model supplies analytic (zero) gradients.
pub fn eval_f_qdot(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<Vec<Vec3>, DynamicsError> {
    guard_state(model, state, Representation::Velocity)?;
    Ok(eval_f_from_qdot(model, state.q(), state.w()))
}

/// Configuration-derivative force terms in the angular representation;
/// the same quantity as [`eval_f_qdot`] expressed through
/// `qdot_j = omega_j cross q_j`.
pub fn eval_f_omega(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<Vec<Vec3>, DynamicsError> {
    guard_state(model, state, Representation::Omega)?;
    let qdot: Vec<Vec3> = state
        .q()
        .iter()
        .zip(state.w())
        .map(|(q, o)| o.cross(q))
        .collect();
    Ok(eval_f_from_qdot(model, state.q(), &qdot))
}

pub(crate) fn accel_qdot_raw(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    t: f64,
    q: &[Vec3],
    qdot: &[Vec3],
) -> Result<AccelerationResult, DynamicsError> {
    let n = q.len();
    let m = model.inertia(q);
    let a = linsys::mu_matrix(&m, q);
    let f_cfg = eval_f_from_qdot(model, q, qdot);
    let f_ext = forces.forces(t, q);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let du = potential_gradient(model, q, i);
        let inner = f_cfg[i] + du - f_ext[i];
        b.push(-(m[(i, i)] * qdot[i].norm_squared() * q[i] + project_tangent(&q[i], &inner)));
    }
    let sol = linsys::solve(a, &b)?;
    Ok(AccelerationResult {
        accel: sol.x,
        rcond: sol.rcond,
    })
}

pub(crate) fn accel_omega_raw(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    t: f64,
    q: &[Vec3],
    omega: &[Vec3],
) -> Result<AccelerationResult, DynamicsError> {
    let n = q.len();
    let m = model.inertia(q);
    let a = linsys::pi_matrix(&m, q);
    let qdot: Vec<Vec3> = q.iter().zip(omega).map(|(qi, o)| o.cross(qi)).collect();
    let f_cfg = eval_f_from_qdot(model, q, &qdot);
    let f_ext = forces.forces(t, q);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let si = hat(&q[i]);
        let mut rhs = Vec3::zeros();
        for j in 0..n {
            rhs += m[(i, j)] * omega[j].norm_squared() * (si * q[j]);
        }
        let du = potential_gradient(model, q, i);
        rhs -= si * (f_cfg[i] + du - f_ext[i]);
        b.push(rhs);
    }
    let sol = linsys::solve(a, &b)?;
    // The angular accelerations are tangent analytically; project away
    // the rounding-level normal component.
    let accel = sol
        .x
        .iter()
        .zip(q)
        .map(|(w, qi)| project_tangent(qi, w))
        .collect();
    Ok(AccelerationResult {
        accel,
        rcond: sol.rcond,
    })
}

/// Sphere accelerations `qddot_i` for a state in the velocity
/// representation.
///
/// The normal component of each acceleration is determined by the
/// constraint, `q_i . qddot_i = -||qdot_i||^2`; the solved system
/// enforces it without projection.
pub fn el_accel_qdot(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    state: &SystemState,
) -> Result<AccelerationResult, DynamicsError> {
    guard_state(model, state, Representation::Velocity)?;
    accel_qdot_raw(model, forces, state.time(), state.q(), state.w())
}

/// Angular accelerations `omegadot_i` for a state in the angular
/// velocity representation.
pub fn el_accel_omega(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    state: &SystemState,
) -> Result<AccelerationResult, DynamicsError> {
    guard_state(model, state, Representation::Omega)?;
    accel_omega_raw(model, forces, state.time(), state.q(), state.w())
}

pub(crate) fn kinetic_qdot(model: &dyn QuadraticModel, q: &[Vec3], qdot: &[Vec3]) -> f64 {
    let m = model.inertia(q);
    let n = q.len();
    let mut t = 0.0;
    for j in 0..n {
        for k in 0..n {
            t += 0.5 * m[(j, k)] * qdot[j].dot(&qdot[k]);
        }
    }
    t
}

pub(crate) fn kinetic_omega(model: &dyn QuadraticModel, q: &[Vec3], omega: &[Vec3]) -> f64 {
    let m = model.inertia(q);
    let n = q.len();
    let mut t = 0.0;
    for i in 0..n {
        t += 0.5 * m[(i, i)] * omega[i].norm_squared();
        for j in 0..n {
            if j != i {
                let a = hat(&q[i]) * omega[i];
                let b = hat(&q[j]) * omega[j];
                t += 0.5 * m[(i, j)] * a.dot(&b);
            }
        }
    }
    t
}

/// Kinetic and potential energies at a state in either velocity-like
/// representation. The two representations agree to rounding.
pub fn lagrangian_value(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<EnergyBreakdown, DynamicsError> {
    check_model(model)?;
    let kinetic = match state.rep() {
        Representation::Velocity => kinetic_qdot(model, state.q(), state.w()),
        Representation::Omega => kinetic_omega(model, state.q(), state.w()),
        other => {
            return Err(DynamicsError::WrongRepresentation {
                expected: "velocity or omega",
                got: other.label(),
            })
        }
    };
    Ok(EnergyBreakdown {
        kinetic,
        potential: model.potential(state.q()),
    })
}
