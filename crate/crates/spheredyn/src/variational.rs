//! Verification machinery: action integrals, perturbation families,
//! stationarity residuals, and the four-way formulation comparison.
//!
//! This lives in the library rather than the test tree so the command
//! line `check` mode can run the same diagnostics against user-supplied
//! models.

use rand::Rng;

use crate::error::DynamicsError;
use crate::hamiltonian::{convert, hamiltonian_mu, hamiltonian_pi, legendre_mu, legendre_pi};
use crate::integrator::{integrate, IntegratorSpec, Trajectory};
use crate::lagrangian::lagrangian_value;
use crate::model::{ForceModel, QuadraticModel};
use crate::so3::Vec3;
use crate::sphere::{
    convert_kinematic, exp_rotate, project_tangent, Representation, SystemState,
};
use crate::tol;

/// Which integrand the action is built from. All four agree on the same
/// physical trajectory up to conversion rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionForm {
    /// Lagrangian in base points and sphere velocities.
    LagrangianQdot,
    /// Lagrangian in base points and angular velocities.
    LagrangianOmega,
    /// Phase-space integrand `sum mu_i . qdot_i - H(q, mu)`.
    PhaseMu,
    /// Phase-space integrand `sum pi_i . omega_i - H(q, pi)`.
    PhasePi,
}

impl ActionForm {
    pub const ALL: [ActionForm; 4] = [
        ActionForm::LagrangianQdot,
        ActionForm::LagrangianOmega,
        ActionForm::PhaseMu,
        ActionForm::PhasePi,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ActionForm::LagrangianQdot => "lagrangian-qdot",
            ActionForm::LagrangianOmega => "lagrangian-omega",
            ActionForm::PhaseMu => "phase-mu",
            ActionForm::PhasePi => "phase-pi",
        }
    }
}

/// Composite quadrature rule over the trajectory's own sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    Trapezoid,
    Simpson,
}

/// Result of an action evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ActionValue {
    pub value: f64,
    pub quadrature: Quadrature,
    pub samples: usize,
}

fn simpson_even(f: &[f64], h: f64) -> f64 {
    // classic composite rule; f holds an even number of intervals
    let m = f.len() - 1;
    let mut acc = f[0] + f[m];
    for (k, v) in f.iter().enumerate().take(m).skip(1) {
        acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

fn three_eighths(f: &[f64], h: f64) -> f64 {
    0.375 * h * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3])
}

fn quadrature_sum(f: &[f64], h: f64, rule: Quadrature) -> f64 {
    let m = f.len() - 1;
    match rule {
        Quadrature::Trapezoid => {
            let mut acc = 0.5 * (f[0] + f[m]);
            acc += f[1..m].iter().sum::<f64>();
            acc * h
        }
        Quadrature::Simpson => {
            if m.is_multiple_of(2) {
                simpson_even(f, h)
            } else if m == 3 {
                three_eighths(f, h)
            } else {
                // odd interval count: composite rule up to the last
                // three intervals, 3/8 rule on the tail
                simpson_even(&f[..=m - 3], h) + three_eighths(&f[m - 3..], h)
            }
        }
    }
}

fn uniform_step(samples: &[SystemState]) -> Result<f64, DynamicsError> {
    let h = samples[1].time() - samples[0].time();
    for k in 1..samples.len() {
        let dt = samples[k].time() - samples[k - 1].time();
        if (dt - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(DynamicsError::invalid(format!(
                "nonuniform sample spacing: {dt:.6e} vs {h:.6e} at sample {k}"
            )));
        }
    }
    if h <= 0.0 {
        return Err(DynamicsError::invalid(format!(
            "sample times must increase, first step is {h:.6e}"
        )));
    }
    Ok(h)
}

fn integrand(
    model: &dyn QuadraticModel,
    sample: &SystemState,
    form: ActionForm,
) -> Result<f64, DynamicsError> {
    match form {
        ActionForm::LagrangianQdot => {
            let s = convert(model, sample, Representation::Velocity)?;
            Ok(lagrangian_value(model, &s)?.lagrangian())
        }
        ActionForm::LagrangianOmega => {
            let s = convert(model, sample, Representation::Omega)?;
            Ok(lagrangian_value(model, &s)?.lagrangian())
        }
        ActionForm::PhaseMu => {
            let sv = convert(model, sample, Representation::Velocity)?;
            let mu = legendre_mu(model, &sv)?;
            let pairing: f64 = mu.w().iter().zip(sv.w()).map(|(m, v)| m.dot(v)).sum();
            Ok(pairing - hamiltonian_mu(model, &mu)?)
        }
        ActionForm::PhasePi => {
            let so = convert(model, sample, Representation::Omega)?;
            let pi = legendre_pi(model, &so)?;
            let pairing: f64 = pi.w().iter().zip(so.w()).map(|(p, o)| p.dot(o)).sum();
            Ok(pairing - hamiltonian_pi(model, &pi)?)
        }
    }
}

/// Action integral of a sampled trajectory in the chosen form.
pub fn action(
    model: &dyn QuadraticModel,
    samples: &[SystemState],
    form: ActionForm,
    rule: Quadrature,
) -> Result<ActionValue, DynamicsError> {
    if samples.len() < 3 {
        return Err(DynamicsError::InsufficientSamples { got: samples.len(), needed: 3 });
    }
    let h = uniform_step(samples)?;
    let values = samples
        .iter()
        .map(|s| integrand(model, s, form))
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(ActionValue {
        value: quadrature_sum(&values, h, rule),
        quadrature: rule,
        samples: samples.len(),
    })
}

/// Endpoint-vanishing perturbation family over a time window.
///
/// The field at body `i` is `sin(pi (t - t0)/(tf - t0))` times the
/// projection of a fixed ambient vector `c_i` onto the moving tangent
/// plane, so it vanishes at both ends and stays orthogonal to the base
/// point by construction. Perturbed base points are
/// `exp_rotate(eps * gamma_i(t), q_i(t))`, whose leading variation is
/// `gamma_i cross q_i`.
#[derive(Debug, Clone)]
pub struct VariationCurve {
    c: Vec<Vec3>,
    t0: f64,
    tf: f64,
}

impl VariationCurve {
    pub fn sin_bump(c: Vec<Vec3>, t0: f64, tf: f64) -> Result<Self, DynamicsError> {
        if c.is_empty() {
            return Err(DynamicsError::invalid("a variation curve needs at least one body"));
        }
        if !t0.is_finite() || !tf.is_finite() || tf <= t0 {
            return Err(DynamicsError::invalid(format!(
                "variation window [{t0}, {tf}] must have positive length"
            )));
        }
        Ok(VariationCurve { c, t0, tf })
    }

    /// A sin-bump curve with the fixed vectors drawn from a cube of the
    /// given half-width.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        t0: f64,
        tf: f64,
        scale: f64,
    ) -> Result<Self, DynamicsError> {
        let c = (0..n).map(|_| crate::sample::box_vector(rng, scale)).collect();
        Self::sin_bump(c, t0, tf)
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    fn bump(&self, t: f64) -> (f64, f64) {
        let rate = std::f64::consts::PI / (self.tf - self.t0);
        let x = rate * (t - self.t0);
        (x.sin(), rate * x.cos())
    }

    /// The field itself at time `t` over the reference base points.
    pub fn gamma(&self, t: f64, q: &[Vec3]) -> Vec<Vec3> {
        let (s, _) = self.bump(t);
        q.iter()
            .zip(&self.c)
            .map(|(qi, ci)| s * project_tangent(qi, ci))
            .collect()
    }

    /// Time derivative of the field along the reference trajectory; the
    /// moving projector contributes `-(qdot q^T + q qdot^T) c`.
    pub fn gamma_dot(&self, t: f64, q: &[Vec3], qdot: &[Vec3]) -> Vec<Vec3> {
        let (s, sdot) = self.bump(t);
        q.iter()
            .zip(qdot)
            .zip(&self.c)
            .map(|((qi, di), ci)| {
                sdot * project_tangent(qi, ci) - s * (di * qi.dot(ci) + qi * di.dot(ci))
            })
            .collect()
    }
}

/// How the perturbed velocities are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VelocityRecipe {
    /// First-order update `qdot + eps (gammadot cross q + gamma cross qdot)`.
    Analytic,
    /// Second-order time differences of the perturbed base points.
    TimeDifference,
}

fn to_velocity_samples(samples: &[SystemState]) -> Result<Vec<SystemState>, DynamicsError> {
    samples
        .iter()
        .map(|s| convert_kinematic(s, Representation::Velocity))
        .collect()
}

/// Apply a variation curve to a trajectory at a fixed amplitude.
///
/// Accepts velocity or angular-velocity samples and returns velocity
/// samples. With amplitude zero the output reproduces the input
/// coordinates exactly.
pub fn perturb_trajectory(
    samples: &[SystemState],
    curve: &VariationCurve,
    eps: f64,
    recipe: VelocityRecipe,
) -> Result<Vec<SystemState>, DynamicsError> {
    if samples.is_empty() {
        return Err(DynamicsError::CurveMismatch {
            reason: "cannot perturb an empty trajectory".into(),
        });
    }
    if samples[0].n() != curve.n() {
        return Err(DynamicsError::CurveMismatch {
            reason: format!(
                "curve covers {} bodies but the trajectory has {}",
                curve.n(),
                samples[0].n()
            ),
        });
    }
    let span = 1e-9 * (curve.tf - curve.t0).max(1.0);
    for s in samples {
        if s.time() < curve.t0 - span || s.time() > curve.tf + span {
            return Err(DynamicsError::CurveMismatch {
                reason: format!(
                    "sample time {} outside the curve window [{}, {}]",
                    s.time(),
                    curve.t0,
                    curve.tf
                ),
            });
        }
    }
    let base = to_velocity_samples(samples)?;
    let n = curve.n();

    let mut out = Vec::with_capacity(base.len());
    for s in &base {
        let gamma = curve.gamma(s.time(), s.q());
        let q: Vec<Vec3> = (0..n)
            .map(|i| exp_rotate(&(eps * gamma[i]), &s.q()[i]))
            .collect();
        let v = match recipe {
            VelocityRecipe::Analytic => {
                let gd = curve.gamma_dot(s.time(), s.q(), s.w());
                (0..n)
                    .map(|i| {
                        s.w()[i] + eps * (gd[i].cross(&s.q()[i]) + gamma[i].cross(&s.w()[i]))
                    })
                    .collect()
            }
            VelocityRecipe::TimeDifference => vec![Vec3::zeros(); n],
        };
        out.push(SystemState::new_unchecked(q, v, Representation::Velocity, s.time()));
    }

    if recipe == VelocityRecipe::TimeDifference {
        if base.len() < 3 {
            return Err(DynamicsError::InsufficientSamples { got: base.len(), needed: 3 });
        }
        let h = uniform_step(&base)?;
        let last = out.len() - 1;
        let mut vels = Vec::with_capacity(out.len());
        for k in 0..out.len() {
            let v: Vec<Vec3> = (0..n)
                .map(|i| {
                    if k == 0 {
                        (-3.0 * out[0].q()[i] + 4.0 * out[1].q()[i] - out[2].q()[i]) / (2.0 * h)
                    } else if k == last {
                        (3.0 * out[last].q()[i] - 4.0 * out[last - 1].q()[i]
                            + out[last - 2].q()[i])
                            / (2.0 * h)
                    } else {
                        (out[k + 1].q()[i] - out[k - 1].q()[i]) / (2.0 * h)
                    }
                })
                .collect();
            vels.push(v);
        }
        for (state, v) in out.iter_mut().zip(vels) {
            *state = SystemState::new_unchecked(
                state.q().to_vec(),
                v,
                Representation::Velocity,
                state.time(),
            );
        }
    }
    Ok(out)
}

/// Central-difference derivative of the action along a variation curve.
pub fn action_derivative(
    model: &dyn QuadraticModel,
    samples: &[SystemState],
    curve: &VariationCurve,
    eps: f64,
    form: ActionForm,
    rule: Quadrature,
) -> Result<f64, DynamicsError> {
    let plus = perturb_trajectory(samples, curve, eps, VelocityRecipe::Analytic)?;
    let minus = perturb_trajectory(samples, curve, -eps, VelocityRecipe::Analytic)?;
    let a_plus = action(model, &plus, form, rule)?.value;
    let a_minus = action(model, &minus, form, rule)?.value;
    Ok((a_plus - a_minus) / (2.0 * eps))
}

/// Stationarity defect of a trajectory: the action derivative plus the
/// virtual work of the applied forces, maximized over the given curves.
///
/// Near zero when the trajectory solves the equations of motion at the
/// sampling resolution; order one on non-solutions.
pub fn dalembert_residual(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    samples: &[SystemState],
    curves: &[VariationCurve],
) -> Result<f64, DynamicsError> {
    if samples.len() <= 1 {
        return Ok(0.0);
    }
    let base = to_velocity_samples(samples)?;
    let h = uniform_step(&base)?;
    let mut worst: f64 = 0.0;
    for curve in curves {
        let da = action_derivative(
            model,
            &base,
            curve,
            tol::VARIATION_EPSILON,
            ActionForm::LagrangianQdot,
            Quadrature::Simpson,
        )?;
        let work: Vec<f64> = base
            .iter()
            .map(|s| {
                let f = forces.forces(s.time(), s.q());
                let gamma = curve.gamma(s.time(), s.q());
                (0..s.n()).map(|i| f[i].dot(&gamma[i].cross(&s.q()[i]))).sum()
            })
            .collect();
        let dw = quadrature_sum(&work, h, Quadrature::Simpson);
        worst = worst.max((da + dw).abs());
    }
    Ok(worst)
}

/// Residual of the general-form equations of motion for an arbitrary
/// Lagrangian closure: the tangential part of
/// `d/dt (dL/dqdot_i) - dL/dq_i - f_i` along the motion described by
/// `(state, accel)`, all derivatives by nested central differences.
pub fn el_residual_general(
    l: &dyn Fn(&[Vec3], &[Vec3]) -> f64,
    state: &SystemState,
    accel: &[Vec3],
    applied: &[Vec3],
) -> Result<Vec<Vec3>, DynamicsError> {
    if state.rep() != Representation::Velocity {
        return Err(DynamicsError::WrongRepresentation {
            expected: Representation::Velocity.label(),
            got: state.rep().label(),
        });
    }
    let n = state.n();
    if accel.len() != n || applied.len() != n {
        return Err(DynamicsError::invalid(format!(
            "state has {n} bodies but got {} accelerations and {} forces",
            accel.len(),
            applied.len()
        )));
    }
    let grad_step = 1e-5;
    let time_step = 1e-4;
    let q0 = state.q().to_vec();
    let v0 = state.w().to_vec();

    let grad_v = |q: &[Vec3], v: &[Vec3], i: usize| -> Vec3 {
        let mut vv = v.to_vec();
        let mut g = Vec3::zeros();
        for c in 0..3 {
            vv[i][c] = v[i][c] + grad_step;
            let plus = l(q, &vv);
            vv[i][c] = v[i][c] - grad_step;
            let minus = l(q, &vv);
            vv[i][c] = v[i][c];
            g[c] = (plus - minus) / (2.0 * grad_step);
        }
        g
    };
    let grad_q = |q: &[Vec3], v: &[Vec3], i: usize| -> Vec3 {
        let mut qq = q.to_vec();
        let mut g = Vec3::zeros();
        for c in 0..3 {
            qq[i][c] = q[i][c] + grad_step;
            let plus = l(&qq, v);
            qq[i][c] = q[i][c] - grad_step;
            let minus = l(&qq, v);
            qq[i][c] = q[i][c];
            g[c] = (plus - minus) / (2.0 * grad_step);
        }
        g
    };

    let shift = |sign: f64| -> (Vec<Vec3>, Vec<Vec3>) {
        let q = q0.iter().zip(&v0).map(|(a, b)| a + sign * time_step * b).collect();
        let v = v0.iter().zip(accel).map(|(a, b)| a + sign * time_step * b).collect();
        (q, v)
    };
    let (qp, vp) = shift(1.0);
    let (qm, vm) = shift(-1.0);

    let mut residual = Vec::with_capacity(n);
    for i in 0..n {
        let ddt = (grad_v(&qp, &vp, i) - grad_v(&qm, &vm, i)) / (2.0 * time_step);
        let gq = grad_q(&q0, &v0, i);
        residual.push(project_tangent(&q0[i], &(ddt - gq - applied[i])));
    }
    Ok(residual)
}

/// Result of integrating the same physics in all four representations.
#[derive(Debug, Clone)]
pub struct FormComparison {
    /// Representation order: velocity, angular velocity, then the two
    /// momentum forms.
    pub representations: [Representation; 4],
    pub trajectories: Vec<Trajectory>,
    /// Sample times, shared by all four runs.
    pub times: Vec<f64>,
    /// Per-sample worst base-point disagreement over the six pairs.
    pub divergence: Vec<f64>,
}

impl FormComparison {
    pub fn max_divergence(&self) -> f64 {
        self.divergence.iter().cloned().fold(0.0, f64::max)
    }
}

/// Integrate one initial condition in all four representations with the
/// same scheme and step.
pub fn integrate_all_forms(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    spec: &IntegratorSpec,
    initial: &SystemState,
) -> Result<FormComparison, DynamicsError> {
    let representations = [
        Representation::Velocity,
        Representation::Omega,
        Representation::MomentumMu,
        Representation::MomentumPi,
    ];
    let mut trajectories = Vec::with_capacity(4);
    for rep in representations {
        let init = convert(model, initial, rep)?;
        trajectories.push(integrate(model, forces, spec, &init)?);
    }
    let len = trajectories[0].samples.len();
    let n = initial.n();
    let times = trajectories[0].samples.iter().map(|s| s.time()).collect();
    let mut divergence = Vec::with_capacity(len);
    for k in 0..len {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                for i in 0..n {
                    let d = (trajectories[a].samples[k].q()[i]
                        - trajectories[b].samples[k].q()[i])
                        .norm();
                    worst = worst.max(d);
                }
            }
        }
        divergence.push(worst);
    }
    Ok(FormComparison { representations, trajectories, times, divergence })
}

/// Worst base-point disagreement between the four formulations over a
/// whole run.
pub fn cross_form_agreement(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    spec: &IntegratorSpec,
    initial: &SystemState,
) -> Result<f64, DynamicsError> {
    Ok(integrate_all_forms(model, forces, spec, initial)?.max_divergence())
}
