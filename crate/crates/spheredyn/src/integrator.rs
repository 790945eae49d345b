//! Fixed-step explicit integrators over any of the four state
//! representations.
//!
//! Stage evaluations bypass the public entry guards: intermediate stage
//! states legitimately sit a little off the constraint set, by an amount
//! that shrinks with the step. After each accepted step the state is
//! optionally repaired by renormalizing the base points and projecting
//! the fiber variables onto the updated tangent planes; the repair is
//! applied once per step, never inside stages.

use crate::error::DynamicsError;
use crate::hamiltonian::{energy_raw, rhs_mu_raw, rhs_pi_raw};
use crate::lagrangian::{accel_omega_raw, accel_qdot_raw};
use crate::model::{check_model, ForceModel, QuadraticModel};
use crate::so3::Vec3;
use crate::sphere::{Representation, SystemState};
use crate::tol;

/// Explicit Runge-Kutta scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order scheme.
    Rk4,
    /// Heun's second-order predictor-corrector.
    Heun,
    /// Forward Euler.
    Euler,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Heun => "heun",
            Method::Euler => "euler",
        }
    }
}

/// Per-step constraint handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repair {
    /// Renormalize base points and re-project fiber variables after
    /// each accepted step.
    Project,
    /// Leave the state as the scheme produced it.
    None,
}

/// A validated integration request.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorSpec {
    method: Method,
    step: f64,
    horizon: f64,
    repair: Repair,
}

impl IntegratorSpec {
    pub fn new(
        method: Method,
        step: f64,
        horizon: f64,
        repair: Repair,
    ) -> Result<Self, DynamicsError> {
        if !step.is_finite() || step <= 0.0 {
            return Err(DynamicsError::invalid(format!(
                "step must be positive and finite, got {step}"
            )));
        }
        if !horizon.is_finite() || horizon < 0.0 {
            return Err(DynamicsError::invalid(format!(
                "horizon must be nonnegative and finite, got {horizon}"
            )));
        }
        if horizon > 0.0 && step > horizon {
            return Err(DynamicsError::invalid(format!(
                "step {step} exceeds horizon {horizon}"
            )));
        }
        Ok(IntegratorSpec { method, step, horizon, repair })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn repair(&self) -> Repair {
        self.repair
    }

    /// Number of steps taken: the horizon divided by the step, rounded
    /// down with a small relief so that an intended integer multiple is
    /// not lost to rounding.
    pub fn n_steps(&self) -> usize {
        (self.horizon / self.step + 1e-9).floor() as usize
    }
}

/// Per-sample record kept alongside the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub time: f64,
    pub energy: f64,
    pub max_norm_error: f64,
    pub max_tangency_error: f64,
}

/// An integrated trajectory: one sample per accepted step, plus the
/// initial state, each with its diagnostics row.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<SystemState>,
    pub diagnostics: Vec<StepDiagnostics>,
}

/// Compact rollup of a trajectory's diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub samples: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_energy_drift: f64,
    pub max_norm_error: f64,
    pub max_tangency_error: f64,
}

impl Trajectory {
    pub fn last(&self) -> &SystemState {
        self.samples.last().expect("trajectory holds at least the initial sample")
    }

    pub fn summary(&self) -> RunSummary {
        let e0 = self.diagnostics[0].energy;
        let mut drift: f64 = 0.0;
        let mut norm: f64 = 0.0;
        let mut tan: f64 = 0.0;
        for d in &self.diagnostics {
            drift = drift.max((d.energy - e0).abs());
            norm = norm.max(d.max_norm_error);
            tan = tan.max(d.max_tangency_error);
        }
        RunSummary {
            samples: self.samples.len(),
            initial_energy: e0,
            final_energy: self.diagnostics.last().unwrap().energy,
            max_energy_drift: drift,
            max_norm_error: norm,
            max_tangency_error: tan,
        }
    }
}

struct Derivative {
    qdot: Vec<Vec3>,
    wdot: Vec<Vec3>,
}

fn eval(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    rep: Representation,
    t: f64,
    q: &[Vec3],
    w: &[Vec3],
) -> Result<Derivative, DynamicsError> {
    match rep {
        Representation::Velocity => {
            let a = accel_qdot_raw(model, forces, t, q, w)?;
            Ok(Derivative { qdot: w.to_vec(), wdot: a.accel })
        }
        Representation::Omega => {
            let qdot = w.iter().zip(q).map(|(o, qi)| o.cross(qi)).collect();
            let a = accel_omega_raw(model, forces, t, q, w)?;
            Ok(Derivative { qdot, wdot: a.accel })
        }
        Representation::MomentumMu => {
            let r = rhs_mu_raw(model, forces, t, q, w)?;
            Ok(Derivative { qdot: r.qdot, wdot: r.wdot })
        }
        Representation::MomentumPi => {
            let r = rhs_pi_raw(model, forces, t, q, w)?;
            Ok(Derivative { qdot: r.qdot, wdot: r.wdot })
        }
    }
}

fn shifted(q: &[Vec3], w: &[Vec3], d: &Derivative, s: f64) -> (Vec<Vec3>, Vec<Vec3>) {
    let qs = q.iter().zip(&d.qdot).map(|(a, b)| a + s * b).collect();
    let ws = w.iter().zip(&d.wdot).map(|(a, b)| a + s * b).collect();
    (qs, ws)
}

fn step_once(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    spec: &IntegratorSpec,
    rep: Representation,
    t: f64,
    q: &mut Vec<Vec3>,
    w: &mut Vec<Vec3>,
) -> Result<(), DynamicsError> {
    let h = spec.step;
    match spec.method {
        Method::Euler => {
            let k1 = eval(model, forces, rep, t, q, w)?;
            let (qn, wn) = shifted(q, w, &k1, h);
            *q = qn;
            *w = wn;
        }
        Method::Heun => {
            let k1 = eval(model, forces, rep, t, q, w)?;
            let (q1, w1) = shifted(q, w, &k1, h);
            let k2 = eval(model, forces, rep, t + h, &q1, &w1)?;
            for i in 0..q.len() {
                q[i] += 0.5 * h * (k1.qdot[i] + k2.qdot[i]);
                w[i] += 0.5 * h * (k1.wdot[i] + k2.wdot[i]);
            }
        }
        Method::Rk4 => {
            let k1 = eval(model, forces, rep, t, q, w)?;
            let (q1, w1) = shifted(q, w, &k1, 0.5 * h);
            let k2 = eval(model, forces, rep, t + 0.5 * h, &q1, &w1)?;
            let (q2, w2) = shifted(q, w, &k2, 0.5 * h);
            let k3 = eval(model, forces, rep, t + 0.5 * h, &q2, &w2)?;
            let (q3, w3) = shifted(q, w, &k3, h);
            let k4 = eval(model, forces, rep, t + h, &q3, &w3)?;
            let c = h / 6.0;
            for i in 0..q.len() {
                q[i] += c * (k1.qdot[i] + 2.0 * k2.qdot[i] + 2.0 * k3.qdot[i] + k4.qdot[i]);
                w[i] += c * (k1.wdot[i] + 2.0 * k2.wdot[i] + 2.0 * k3.wdot[i] + k4.wdot[i]);
            }
        }
    }
    Ok(())
}

fn magnitude(q: &[Vec3], w: &[Vec3]) -> f64 {
    let mut m: f64 = 0.0;
    for v in q.iter().chain(w) {
        for c in 0..3 {
            m = m.max(v[c].abs());
        }
    }
    m
}

/// Integrate a model from `initial` with a fixed step.
///
/// Returns one sample per step plus the initial state; sample `k` sits
/// at `initial.time() + k * step`. A state whose largest component
/// leaves the finite range accepted by the library aborts the run with
/// a divergence error carrying the time of the offending sample.
pub fn integrate(
    model: &dyn QuadraticModel,
    forces: &dyn ForceModel,
    spec: &IntegratorSpec,
    initial: &SystemState,
) -> Result<Trajectory, DynamicsError> {
    check_model(model)?;
    if initial.n() != model.n() {
        return Err(DynamicsError::invalid(format!(
            "initial state has {} bodies but the model has {}",
            initial.n(),
            model.n()
        )));
    }
    if let Some(v) = initial
        .violations(tol::EVALUATOR_GUARD, tol::EVALUATOR_GUARD)
        .first()
    {
        return Err(DynamicsError::TangencyViolation {
            index: v.index,
            norm_error: (initial.q()[v.index].norm() - 1.0).abs(),
            tangency_error: crate::sphere::tangency_error(
                &initial.q()[v.index],
                &initial.w()[v.index],
            ),
            time: Some(initial.time()),
        });
    }

    let rep = initial.rep();
    let t0 = initial.time();
    let h = spec.step;
    let n_steps = spec.n_steps();

    let mut q = initial.q().to_vec();
    let mut w = initial.w().to_vec();
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut diagnostics = Vec::with_capacity(n_steps + 1);

    let record = |q: &[Vec3],
                      w: &[Vec3],
                      t: f64,
                      samples: &mut Vec<SystemState>,
                      diagnostics: &mut Vec<StepDiagnostics>|
     -> Result<(), DynamicsError> {
        let mag = magnitude(q, w);
        if !mag.is_finite() || mag > tol::DIVERGENCE_LIMIT {
            return Err(DynamicsError::DivergenceDetected { time: t, magnitude: mag });
        }
        let state = SystemState::new_unchecked(q.to_vec(), w.to_vec(), rep, t);
        let energy = energy_raw(model, rep, q, w).map_err(|e| e.at_time(t))?;
        diagnostics.push(StepDiagnostics {
            time: t,
            energy,
            max_norm_error: state.max_norm_error(),
            max_tangency_error: state.max_tangency_error(),
        });
        samples.push(state);
        Ok(())
    };

    record(&q, &w, t0, &mut samples, &mut diagnostics)?;
    for k in 0..n_steps {
        let t = t0 + k as f64 * h;
        step_once(model, forces, spec, rep, t, &mut q, &mut w)
            .map_err(|e| e.at_time(t))?;
        if spec.repair == Repair::Project {
            repair_in_place(&mut q, &mut w);
        }
        record(&q, &w, t0 + (k + 1) as f64 * h, &mut samples, &mut diagnostics)?;
    }
    Ok(Trajectory { samples, diagnostics })
}

fn repair_in_place(q: &mut [Vec3], w: &mut [Vec3]) {
    for (qi, wi) in q.iter_mut().zip(w.iter_mut()) {
        *qi /= qi.norm();
        *wi -= *qi * qi.dot(wi);
    }
}
