//! Hamiltonian dynamics in the two momentum representations.
//!
//! The momentum conjugate to the sphere velocity is
//! `mu_i = m_ii qdot_i + (I - q_i q_i^T) sum_{j != i} m_ij qdot_j`,
//! and the momentum conjugate to the angular velocity is
//! `pi_i = m_ii omega_i + sum_{j != i} hat(q_i)^T m_ij hat(q_j) omega_j`.
//! Both maps share their matrices with the acceleration evaluators, so
//! inverting them is a linear solve; the inverse inertia is never
//! materialized.
//!
//! The inverse is applied as a symmetric sandwich: project the momenta
//! onto their tangent planes, solve the forward system, project the
//! result. On valid states the projections are no-ops. Off the
//! constraint set they pin down one particular smooth extension of the
//! Hamiltonian, which matters because the configuration gradient is
//! taken by finite differences of exactly that extension: gradient and
//! momentum derivative then belong to the same function, and the phase
//! equations reproduce the Euler-Lagrange flow instead of drifting by a
//! spurious tangential term.

use crate::error::DynamicsError;
use crate::lagrangian::{kinetic_qdot, lagrangian_value};
use crate::linsys;
use crate::model::{check_model, potential_gradient, ForceModel, QuadraticModel};
use crate::so3::{hat, Vec3};
use crate::sphere::{convert_kinematic, project_tangent, Representation, SystemState};
use crate::tol;

/// Which momentum map a solve refers to.
#[derive(Clone, Copy, PartialEq)]
enum Map {
    Mu,
    Pi,
}

fn momentum_matrix(map: Map, model: &dyn QuadraticModel, q: &[Vec3]) -> nalgebra::DMatrix<f64> {
    let m = model.inertia(q);
    match map {
        Map::Mu => linsys::mu_matrix(&m, q),
        Map::Pi => linsys::pi_matrix(&m, q),
    }
}

/// Projected inverse of a momentum map: tangentialize, solve, tangentialize.
fn apply_inverse(
    map: Map,
    model: &dyn QuadraticModel,
    q: &[Vec3],
    p: &[Vec3],
) -> Result<(Vec<Vec3>, f64), DynamicsError> {
    let pt: Vec<Vec3> = q.iter().zip(p).map(|(qi, pi)| project_tangent(qi, pi)).collect();
    let sol = linsys::solve(momentum_matrix(map, model, q), &pt)?;
    let out = sol
        .x
        .iter()
        .zip(q)
        .map(|(x, qi)| project_tangent(qi, x))
        .collect();
    Ok((out, sol.rcond))
}

fn kinetic(map: Map, model: &dyn QuadraticModel, q: &[Vec3], p: &[Vec3]) -> Result<f64, DynamicsError> {
    let pt: Vec<Vec3> = q.iter().zip(p).map(|(qi, pi)| project_tangent(qi, pi)).collect();
    let sol = linsys::solve(momentum_matrix(map, model, q), &pt)?;
    Ok(0.5
        * pt.iter()
            .zip(&sol.x)
            .map(|(a, b)| a.dot(b))
            .sum::<f64>())
}

fn guard(
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
    if let Some(v) = state
        .violations(tol::EVALUATOR_GUARD, tol::EVALUATOR_GUARD)
        .first()
    {
        return Err(DynamicsError::TangencyViolation {
            index: v.index,
            norm_error: (state.q()[v.index].norm() - 1.0).abs(),
            tangency_error: crate::sphere::tangency_error(&state.q()[v.index], &state.w()[v.index]),
            time: Some(state.time()),
        });
    }
    Ok(())
}

/// Momentum conjugate to the sphere velocity.
pub fn legendre_mu(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<SystemState, DynamicsError> {
    guard(model, state, Representation::Velocity)?;
    let a = momentum_matrix(Map::Mu, model, state.q());
    Ok(state.relabel(linsys::apply(&a, state.w()), Representation::MomentumMu))
}

/// Momentum conjugate to the angular velocity.
pub fn legendre_pi(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<SystemState, DynamicsError> {
    guard(model, state, Representation::Omega)?;
    let a = momentum_matrix(Map::Pi, model, state.q());
    Ok(state.relabel(linsys::apply(&a, state.w()), Representation::MomentumPi))
}

/// Inverse of [`legendre_mu`]: recover the sphere velocities.
pub fn velocity_from_mu(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<SystemState, DynamicsError> {
    guard(model, state, Representation::MomentumMu)?;
    let (v, _) = apply_inverse(Map::Mu, model, state.q(), state.w())?;
    Ok(state.relabel(v, Representation::Velocity))
}

/// Inverse of [`legendre_pi`]: recover the angular velocities.
pub fn omega_from_pi(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<SystemState, DynamicsError> {
    guard(model, state, Representation::MomentumPi)?;
    let (o, _) = apply_inverse(Map::Pi, model, state.q(), state.w())?;
    Ok(state.relabel(o, Representation::Omega))
}

/// Hamiltonian in the velocity-conjugate momentum: kinetic part
/// `1/2 mu . (inverse inertia applied to mu)` plus the potential.
pub fn hamiltonian_mu(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<f64, DynamicsError> {
    guard(model, state, Representation::MomentumMu)?;
    Ok(kinetic(Map::Mu, model, state.q(), state.w())? + model.potential(state.q()))
}

/// Hamiltonian in the angular-velocity-conjugate momentum.
pub fn hamiltonian_pi(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<f64, DynamicsError> {
    guard(model, state, Representation::MomentumPi)?;
    Ok(kinetic(Map::Pi, model, state.q(), state.w())? + model.potential(state.q()))
}

fn dh_dq_quotient(
    map: Map,
    model: &dyn QuadraticModel,
    q: &[Vec3],
    p: &[Vec3],
    wrt: usize,
    step: f64,
) -> Result<Vec3, DynamicsError> {
    let mut g = potential_gradient(model, q, wrt);
    let mut probe = q.to_vec();
    for c in 0..3 {
        probe[wrt][c] = q[wrt][c] + step;
        let plus = kinetic(map, model, &probe, p)?;
        probe[wrt][c] = q[wrt][c] - step;
        let minus = kinetic(map, model, &probe, p)?;
        probe[wrt][c] = q[wrt][c];
        g[c] += (plus - minus) / (2.0 * step);
    }
    Ok(g)
}

fn dh_dq(
    map: Map,
    model: &dyn QuadraticModel,
    q: &[Vec3],
    p: &[Vec3],
    wrt: usize,
) -> Result<Vec3, DynamicsError> {
    let s = tol::FD_STEP;
    let mut g = potential_gradient(model, q, wrt);
    let mut probe = q.to_vec();
    for c in 0..3 {
        let mut at = |offset: f64| -> Result<f64, DynamicsError> {
            probe[wrt][c] = q[wrt][c] + offset;
            kinetic(map, model, &probe, p)
        };
        let stencil =
            8.0 * (at(s)? - at(-s)?) - (at(2.0 * s)? - at(-2.0 * s)?);
        probe[wrt][c] = q[wrt][c];
        g[c] += stencil / (12.0 * s);
    }
    Ok(g)
}

/// Configuration gradient of the mu-form Hamiltonian at body `wrt`.
///
/// The kinetic part is a fourth-order central stencil with the momenta
/// held fixed as raw 3-vectors and the perturbed configuration left
/// unnormalized; the potential part is analytic when the model provides
/// it. The surrounding phase equations project out the normal component
/// this ambient derivative carries.
pub fn dh_dq_mu(
    model: &dyn QuadraticModel,
    q: &[Vec3],
    mu: &[Vec3],
    wrt: usize,
) -> Result<Vec3, DynamicsError> {
    dh_dq(Map::Mu, model, q, mu, wrt)
}

/// [`dh_dq_mu`] as a plain three-point quotient with a caller-chosen
/// step, for convergence studies.
pub fn dh_dq_mu_with_step(
    model: &dyn QuadraticModel,
    q: &[Vec3],
    mu: &[Vec3],
    wrt: usize,
    step: f64,
) -> Result<Vec3, DynamicsError> {
    dh_dq_quotient(Map::Mu, model, q, mu, wrt, step)
}

/// Configuration gradient of the pi-form Hamiltonian at body `wrt`.
pub fn dh_dq_pi(
    model: &dyn QuadraticModel,
    q: &[Vec3],
    pi: &[Vec3],
    wrt: usize,
) -> Result<Vec3, DynamicsError> {
    dh_dq(Map::Pi, model, q, pi, wrt)
}

/// [`dh_dq_pi`] as a plain three-point quotient with a caller-chosen
/// step.
pub fn dh_dq_pi_with_step(
    model: &dyn QuadraticModel,
    q: &[Vec3],
    pi: &[Vec3],
    wrt: usize,
    step: f64,
) -> Result<Vec3, DynamicsError> {
    dh_dq_quotient(Map::Pi, model, q, pi, wrt, step)
}

/// Right-hand side of a phase-space formulation.
#[derive(Debug, Clone)]
pub struct PhaseRhs {
    pub qdot: Vec<Vec3>,
    pub wdot: Vec<Vec3>,
    pub rcond: f64,
}

pub(crate) fn rhs_mu_raw(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    t: f64,
    q: &[Vec3],
    mu: &[Vec3],
) -> Result<PhaseRhs, DynamicsError> {
    let n = q.len();
    let (v, rcond) = apply_inverse(Map::Mu, model, q, mu)?;
    let f_ext = forces.forces(t, q);
    let mut qdot = Vec::with_capacity(n);
    let mut mudot = Vec::with_capacity(n);
    for i in 0..n {
        let g = dh_dq(Map::Mu, model, q, mu, i)?;
        qdot.push(v[i]);
        mudot.push(-project_tangent(&q[i], &(g - f_ext[i])) + v[i].cross(&mu[i].cross(&q[i])));
    }
    Ok(PhaseRhs { qdot, wdot: mudot, rcond })
}

pub(crate) fn rhs_pi_raw(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    t: f64,
    q: &[Vec3],
    pi: &[Vec3],
) -> Result<PhaseRhs, DynamicsError> {
    let n = q.len();
    let (omega, rcond) = apply_inverse(Map::Pi, model, q, pi)?;
    let f_ext = forces.forces(t, q);
    let mut qdot = Vec::with_capacity(n);
    let mut pidot = Vec::with_capacity(n);
    for i in 0..n {
        let si = hat(&q[i]);
        let g = dh_dq(Map::Pi, model, q, pi, i)?;
        qdot.push(-(si * omega[i]));
        pidot.push(-(si * g) + omega[i].cross(&pi[i]) + si * f_ext[i]);
    }
    Ok(PhaseRhs { qdot, wdot: pidot, rcond })
}

/// Hamilton's equations in `(q, mu)`:
/// `qdot_i = (I - q_i q_i^T) dH/dmu_i` and
/// `mudot_i = -(I - q_i q_i^T)(dH/dq_i - f_i) + dH/dmu_i cross (mu_i cross q_i)`.
pub fn ham_rhs_mu(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    state: &SystemState,
) -> Result<PhaseRhs, DynamicsError> {
    guard(model, state, Representation::MomentumMu)?;
    rhs_mu_raw(model, forces, state.time(), state.q(), state.w())
}

/// Hamilton's equations in `(q, pi)`:
/// `qdot_i = -hat(q_i) dH/dpi_i` and
/// `pidot_i = -hat(q_i) dH/dq_i + dH/dpi_i cross pi_i + hat(q_i) f_i`.
pub fn ham_rhs_pi(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    state: &SystemState,
) -> Result<PhaseRhs, DynamicsError> {
    guard(model, state, Representation::MomentumPi)?;
    rhs_pi_raw(model, forces, state.time(), state.q(), state.w())
}

pub(crate) fn energy_raw(
    model: &dyn QuadraticModel,
    rep: Representation,
    q: &[Vec3],
    w: &[Vec3],
) -> Result<f64, DynamicsError> {
    let kin = match rep {
        Representation::Velocity => kinetic_qdot(model, q, w),
        Representation::Omega => crate::lagrangian::kinetic_omega(model, q, w),
        Representation::MomentumMu => kinetic(Map::Mu, model, q, w)?,
        Representation::MomentumPi => kinetic(Map::Pi, model, q, w)?,
    };
    Ok(kin + model.potential(q))
}

/// Total energy of a state in any representation.
pub fn total_energy(
    model: &dyn QuadraticModel,
    state: &SystemState,
) -> Result<f64, DynamicsError> {
    match state.rep() {
        Representation::Velocity | Representation::Omega => {
            Ok(lagrangian_value(model, state)?.total())
        }
        Representation::MomentumMu => hamiltonian_mu(model, state),
        Representation::MomentumPi => hamiltonian_pi(model, state),
    }
}

/// Convert a state to any target representation, routing through the
/// velocity representations and the Legendre maps as needed.
pub fn convert(
    model: &dyn QuadraticModel,
    state: &SystemState,
    target: Representation,
) -> Result<SystemState, DynamicsError> {
    if state.rep() == target {
        return Ok(state.clone());
    }
    let vel = match state.rep() {
        Representation::Velocity | Representation::Omega => {
            convert_kinematic(state, Representation::Velocity)?
        }
        Representation::MomentumMu => velocity_from_mu(model, state)?,
        Representation::MomentumPi => {
            convert_kinematic(&omega_from_pi(model, state)?, Representation::Velocity)?
        }
    };
    match target {
        Representation::Velocity => Ok(vel),
        Representation::Omega => convert_kinematic(&vel, Representation::Omega),
        Representation::MomentumMu => legendre_mu(model, &vel),
        Representation::MomentumPi => {
            legendre_pi(model, &convert_kinematic(&vel, Representation::Omega)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::{accel_omega_raw, accel_qdot_raw};
    use crate::model::test_models::CoupledInertia;
    use crate::model::ZeroForces;
    use crate::pendulum::{ChainForces, ChainPendulum};
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const E1: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    fn double_pendulum() -> ChainPendulum {
        ChainPendulum::new(vec![1.0, 1.0], vec![1.0, 1.0], 9.81).unwrap()
    }

    #[test]
    fn legendre_mu_single_body_scales_velocity() {
        let model = ChainPendulum::spherical(2.0, 1.0, 0.0).unwrap();
        let s = SystemState::new(
            vec![E3],
            vec![Vec3::new(0.3, 0.0, 0.0)],
            Representation::Velocity,
            0.0,
        )
        .unwrap();
        let mu = legendre_mu(&model, &s).unwrap();
        assert_eq!(mu.rep(), Representation::MomentumMu);
        assert_relative_eq!(mu.w()[0], Vec3::new(0.6, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn legendre_pi_single_body_scales_omega() {
        let model = ChainPendulum::spherical(3.0, 1.0, 0.0).unwrap();
        let s = SystemState::new(
            vec![E1],
            vec![Vec3::new(0.0, 0.5, 0.0)],
            Representation::Omega,
            0.0,
        )
        .unwrap();
        let pi = legendre_pi(&model, &s).unwrap();
        assert_relative_eq!(pi.w()[0], Vec3::new(0.0, 1.5, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn legendre_round_trips() {
        let dp = double_pendulum();
        let ci = CoupledInertia { analytic: true };
        let models: [&dyn QuadraticModel; 2] = [&dp, &ci];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for model in models {
            for _ in 0..25 {
                let sv = sample::state(&mut rng, 2, Representation::Velocity, 2.0, 0.0);
                let back = velocity_from_mu(model, &legendre_mu(model, &sv).unwrap()).unwrap();
                for i in 0..2 {
                    assert!((back.w()[i] - sv.w()[i]).norm() < 1e-10);
                }
                let so = convert_kinematic(&sv, Representation::Omega).unwrap();
                let back = omega_from_pi(model, &legendre_pi(model, &so).unwrap()).unwrap();
                for i in 0..2 {
                    assert!((back.w()[i] - so.w()[i]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_equals_legendre_pairing_minus_lagrangian() {
        let model = CoupledInertia { analytic: true };
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..25 {
            let sv = sample::state(&mut rng, 2, Representation::Velocity, 2.0, 0.0);
            let mu = legendre_mu(&model, &sv).unwrap();
            let pairing: f64 = mu.w().iter().zip(sv.w()).map(|(m, v)| m.dot(v)).sum();
            let l = lagrangian_value(&model, &sv).unwrap().lagrangian();
            let h = hamiltonian_mu(&model, &mu).unwrap();
            assert_relative_eq!(h, pairing - l, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    #[test]
    fn hanging_double_pendulum_energy() {
        let model = ChainPendulum::new(vec![1.0, 1.0], vec![1.0, 1.0], 10.0).unwrap();
        let rest = SystemState::new(
            vec![-E3, -E3],
            vec![Vec3::zeros(), Vec3::zeros()],
            Representation::Velocity,
            0.0,
        )
        .unwrap();
        let mu = legendre_mu(&model, &rest).unwrap();
        assert_relative_eq!(hamiltonian_mu(&model, &mu).unwrap(), -30.0, epsilon = 1e-12);
        let pi = convert(&model, &rest, Representation::MomentumPi).unwrap();
        assert_relative_eq!(hamiltonian_pi(&model, &pi).unwrap(), -30.0, epsilon = 1e-12);
    }

    #[test]
    fn both_hamiltonians_agree_on_the_same_physical_state() {
        let model = double_pendulum();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let so = sample::state(&mut rng, 2, Representation::Omega, 2.0, 0.0);
            let h_pi = hamiltonian_pi(&model, &legendre_pi(&model, &so).unwrap()).unwrap();
            let sv = convert_kinematic(&so, Representation::Velocity).unwrap();
            let h_mu = hamiltonian_mu(&model, &legendre_mu(&model, &sv).unwrap()).unwrap();
            assert_relative_eq!(h_mu, h_pi, epsilon = 1e-11, max_relative = 1e-11);
        }
    }

    #[test]
    fn gradient_of_constant_inertia_single_body_is_potential_gradient() {
        let model = ChainPendulum::spherical(1.0, 1.0, 9.81).unwrap();
        let q = vec![Vec3::new(0.6, 0.0, -0.8)];
        let mu = vec![crate::sphere::project_tangent(&q[0], &Vec3::new(0.2, -0.4, 0.1))];
        let g = dh_dq_mu(&model, &q, &mu, 0).unwrap();
        assert_relative_eq!(g, Vec3::new(0.0, 0.0, 9.81), epsilon = 1e-9);
    }

    #[test]
    fn gradient_difference_quotient_converges_at_second_order() {
        let model = double_pendulum();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let s = sample::state(&mut rng, 2, Representation::Velocity, 1.5, 0.0);
        let mu_state = legendre_mu(&model, &s).unwrap();
        let (q, mu) = (mu_state.q(), mu_state.w());
        let fine = dh_dq_mu_with_step(&model, q, mu, 0, 1e-5).unwrap();
        let coarse = dh_dq_mu_with_step(&model, q, mu, 0, 1e-2).unwrap();
        let half = dh_dq_mu_with_step(&model, q, mu, 0, 5e-3).unwrap();
        let ratio = (coarse - fine).norm() / (half - fine).norm();
        assert!(
            (3.0..5.5).contains(&ratio),
            "expected Richardson ratio near 4, got {ratio}"
        );
    }

    /// The decisive consistency check: along the Euler-Lagrange flow,
    /// the time derivative of the Legendre map must equal the momentum
    /// equation of the phase-space form.
    #[test]
    fn mu_rate_matches_legendre_derivative_along_el_flow() {
        let dp = double_pendulum();
        let ci = CoupledInertia { analytic: true };
        let models: [&dyn QuadraticModel; 2] = [&dp, &ci];
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for model in models {
            for _ in 0..5 {
                let s = sample::state(&mut rng, 2, Representation::Velocity, 1.5, 0.0);
                let (q, qd) = (s.q().to_vec(), s.w().to_vec());
                let qdd = accel_qdot_raw(model, &ZeroForces, 0.0, &q, &qd).unwrap().accel;
                let mu = legendre_mu(model, &s).unwrap();

                let dt = 1e-5;
                let probe = |sign: f64| -> Vec<Vec3> {
                    let qs: Vec<Vec3> = q.iter().zip(&qd).map(|(a, b)| a + sign * dt * b).collect();
                    let vs: Vec<Vec3> =
                        qd.iter().zip(&qdd).map(|(a, b)| a + sign * dt * b).collect();
                    let st =
                        SystemState::new_unchecked(qs, vs, Representation::Velocity, 0.0);
                    legendre_mu(model, &st).unwrap().w().to_vec()
                };
                let (plus, minus) = (probe(1.0), probe(-1.0));
                let rhs = ham_rhs_mu(model, &ZeroForces, &mu).unwrap();
                for i in 0..2 {
                    let fd = (plus[i] - minus[i]) / (2.0 * dt);
                    assert!(
                        (rhs.wdot[i] - fd).norm() < 1e-6,
                        "mudot mismatch {:.3e}",
                        (rhs.wdot[i] - fd).norm()
                    );
                    assert!((rhs.qdot[i] - qd[i]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pi_rate_matches_legendre_derivative_along_el_flow() {
        let dp = double_pendulum();
        let ci = CoupledInertia { analytic: true };
        let models: [&dyn QuadraticModel; 2] = [&dp, &ci];
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for model in models {
            for _ in 0..5 {
                let s = sample::state(&mut rng, 2, Representation::Omega, 1.5, 0.0);
                let (q, om) = (s.q().to_vec(), s.w().to_vec());
                let qd: Vec<Vec3> = q.iter().zip(&om).map(|(qi, o)| o.cross(qi)).collect();
                let wd = accel_omega_raw(model, &ZeroForces, 0.0, &q, &om).unwrap().accel;
                let pi = legendre_pi(model, &s).unwrap();

                let dt = 1e-5;
                let probe = |sign: f64| -> Vec<Vec3> {
                    let qs: Vec<Vec3> = q.iter().zip(&qd).map(|(a, b)| a + sign * dt * b).collect();
                    let os: Vec<Vec3> =
                        om.iter().zip(&wd).map(|(a, b)| a + sign * dt * b).collect();
                    let st = SystemState::new_unchecked(qs, os, Representation::Omega, 0.0);
                    legendre_pi(model, &st).unwrap().w().to_vec()
                };
                let (plus, minus) = (probe(1.0), probe(-1.0));
                let rhs = ham_rhs_pi(model, &ZeroForces, &pi).unwrap();
                for i in 0..2 {
                    let fd = (plus[i] - minus[i]) / (2.0 * dt);
                    assert!(
                        (rhs.wdot[i] - fd).norm() < 1e-6,
                        "pidot mismatch {:.3e}",
                        (rhs.wdot[i] - fd).norm()
                    );
                    assert!((rhs.qdot[i] - qd[i]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn forced_momentum_rates_include_the_forces() {
        let model = double_pendulum();
        let forces = ChainForces::new(&model, Vec3::new(0.0, 0.0, 0.1), Vec3::new(0.05, 0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let s = sample::state(&mut rng, 2, Representation::Velocity, 1.0, 0.0);
        let (q, qd) = (s.q().to_vec(), s.w().to_vec());
        let qdd = accel_qdot_raw(&model, &forces, 0.0, &q, &qd).unwrap().accel;
        let mu = legendre_mu(&model, &s).unwrap();
        let dt = 1e-5;
        let probe = |sign: f64| -> Vec<Vec3> {
            let qs: Vec<Vec3> = q.iter().zip(&qd).map(|(a, b)| a + sign * dt * b).collect();
            let vs: Vec<Vec3> = qd.iter().zip(&qdd).map(|(a, b)| a + sign * dt * b).collect();
            legendre_mu(
                &model,
                &SystemState::new_unchecked(qs, vs, Representation::Velocity, 0.0),
            )
            .unwrap()
            .w()
            .to_vec()
        };
        let (plus, minus) = (probe(1.0), probe(-1.0));
        let rhs = ham_rhs_mu(&model, &forces, &mu).unwrap();
        for i in 0..2 {
            let fd = (plus[i] - minus[i]) / (2.0 * dt);
            assert!((rhs.wdot[i] - fd).norm() < 1e-6);
        }
    }

    #[test]
    fn momentum_rate_normal_component_identity() {
        // q_i . mudot_i == -qdot_i . mu_i, exactly to rounding.
        let model = CoupledInertia { analytic: true };
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..10 {
            let sv = sample::state(&mut rng, 2, Representation::Velocity, 2.0, 0.0);
            let mu = legendre_mu(&model, &sv).unwrap();
            let rhs = ham_rhs_mu(&model, &ZeroForces, &mu).unwrap();
            for i in 0..2 {
                assert_relative_eq!(
                    mu.q()[i].dot(&rhs.wdot[i]),
                    -rhs.qdot[i].dot(&mu.w()[i]),
                    epsilon = 1e-11,
                    max_relative = 1e-11
                );
            }
        }
    }

    #[test]
    fn free_sphere_pi_is_conserved_pointwise() {
        let model = ChainPendulum::spherical(1.5, 1.0, 0.0).unwrap();
        let q = vec![Vec3::new(0.6, 0.0, 0.8)];
        let pi = vec![crate::sphere::project_tangent(&q[0], &Vec3::new(0.0, 1.0, -0.3))];
        let s = SystemState::new(q, pi, Representation::MomentumPi, 0.0).unwrap();
        let rhs = ham_rhs_pi(&model, &ZeroForces, &s).unwrap();
        assert_relative_eq!(rhs.wdot[0], Vec3::zeros(), epsilon = 1e-9);
        // and the base point precesses about pi
        assert_relative_eq!(rhs.qdot[0].dot(&s.w()[0]), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn convert_round_trips_through_every_representation() {
        let model = double_pendulum();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let so = sample::state(&mut rng, 2, Representation::Omega, 1.5, 0.25);
        for target in [
            Representation::Velocity,
            Representation::Omega,
            Representation::MomentumMu,
            Representation::MomentumPi,
        ] {
            let there = convert(&model, &so, target).unwrap();
            assert_eq!(there.rep(), target);
            assert_eq!(there.time(), 0.25);
            let back = convert(&model, &there, Representation::Omega).unwrap();
            for i in 0..2 {
                assert!((back.w()[i] - so.w()[i]).norm() < 1e-10);
                assert!((back.q()[i] - so.q()[i]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn total_energy_is_representation_independent() {
        let model = double_pendulum();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let so = sample::state(&mut rng, 2, Representation::Omega, 2.0, 0.0);
        let e0 = total_energy(&model, &so).unwrap();
        for target in [
            Representation::Velocity,
            Representation::MomentumMu,
            Representation::MomentumPi,
        ] {
            let s = convert(&model, &so, target).unwrap();
            assert_relative_eq!(total_energy(&model, &s).unwrap(), e0, epsilon = 1e-10);
        }
    }
}
