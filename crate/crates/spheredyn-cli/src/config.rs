//! Scenario file loading and validation.
//!
//! Scenarios are TOML with a versioned schema. Section by section:
//! `[model]` picks the mechanical system, `[forces]` an optional
//! constant actuation, `[initial]` the starting directions and angular
//! velocities, `[run]` the formulation, scheme, step and output names,
//! `[tolerances]` optional overrides for the check and compare bounds.
//! Unknown keys are rejected so typos fail loudly instead of silently
//! running defaults. Body indices in messages are 1-based, matching
//! the order of the config arrays.

use std::path::Path;

use serde::Deserialize;
use spheredyn::integrator::{IntegratorSpec, Method, Repair};
use spheredyn::pendulum::{ChainForces, ChainPendulum};
use spheredyn::sphere::{Representation, SystemState};
use spheredyn::{tol, Vec3};

use crate::Failure;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u64,
    pub model: ModelSection,
    #[serde(default)]
    pub forces: ForcesSection,
    pub initial: InitialSection,
    pub run: RunSection,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: String,
    pub n: usize,
    pub masses: Vec<f64>,
    pub lengths: Vec<f64>,
    pub gravity: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcesSection {
    /// Constant torque on the first link.
    #[serde(default)]
    pub torque: [f64; 3],
    /// Constant disturbance at every joint, scaled by link length.
    #[serde(default)]
    pub disturbance: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Unit direction of each link.
    pub q: Vec<[f64; 3]>,
    /// Angular velocity of each link, orthogonal to its direction.
    pub omega: Vec<[f64; 3]>,
    /// Renormalize and re-project slightly-off inputs instead of
    /// rejecting them.
    #[serde(default)]
    pub repair: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// One of `qdot`, `omega`, `mu`, `pi`.
    pub formulation: String,
    /// One of `rk4`, `heun`, `euler`.
    pub method: String,
    pub step: f64,
    pub horizon: f64,
    #[serde(default = "default_trajectory")]
    pub trajectory: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_trajectory() -> String {
    "trajectory.csv".to_string()
}

fn default_summary() -> String {
    "summary.json".to_string()
}

/// Bounds used by `check` and `compare`. Defaults are calibrated so a
/// healthy build passes with a wide margin; override per scenario to
/// tighten or (deliberately) break them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub hat_identity: f64,
    pub kinematic_round_trip: f64,
    pub momentum_round_trip: f64,
    pub cross_form: f64,
    pub stationarity: f64,
    pub compare_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hat_identity: 1e-10,
            kinematic_round_trip: 1e-12,
            momentum_round_trip: 1e-10,
            cross_form: 1e-6,
            stationarity: 5e-5,
            compare_bound: 1e-6,
        }
    }
}

/// A scenario after validation: the model, forces and initial state
/// are built and ready to integrate.
pub struct Loaded {
    pub scenario: Scenario,
    pub chain: ChainPendulum,
    pub forces: ChainForces,
    /// Initial condition in the angular-velocity representation.
    pub initial: SystemState,
    pub formulation: Representation,
    pub spec: IntegratorSpec,
}

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let scenario: Scenario =
        toml::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
    validate(scenario).map_err(|f| match f {
        Failure::Config(m) => config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn validate(scenario: Scenario) -> Result<Loaded, Failure> {
    if scenario.schema_version != SCHEMA_VERSION {
        return Err(config(format!(
            "schema_version {} not supported, this build reads {SCHEMA_VERSION}",
            scenario.schema_version
        )));
    }

    let m = &scenario.model;
    if m.kind != "chain_pendulum" {
        return Err(config(format!(
            "model.kind \"{}\" unknown, expected \"chain_pendulum\"",
            m.kind
        )));
    }
    if m.n == 0 {
        return Err(config("model.n must be at least 1"));
    }
    if m.masses.len() != m.n || m.lengths.len() != m.n {
        return Err(config(format!(
            "model.n = {} but {} masses and {} lengths given",
            m.n,
            m.masses.len(),
            m.lengths.len()
        )));
    }
    let chain = ChainPendulum::new(m.masses.clone(), m.lengths.clone(), m.gravity)
        .map_err(|e| config(format!("model: {e}")))?;

    let f = &scenario.forces;
    for v in [f.torque, f.disturbance] {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(config("forces entries must be finite"));
        }
    }
    let forces = ChainForces::new(&chain, vec3(f.torque), vec3(f.disturbance));

    let init = &scenario.initial;
    if init.q.len() != m.n || init.omega.len() != m.n {
        return Err(config(format!(
            "model has {} bodies but initial gives {} directions and {} angular velocities",
            m.n,
            init.q.len(),
            init.omega.len()
        )));
    }
    let q: Vec<Vec3> = init.q.iter().map(|a| vec3(*a)).collect();
    let w: Vec<Vec3> = init.omega.iter().map(|a| vec3(*a)).collect();
    for (i, (qi, wi)) in q.iter().zip(&w).enumerate() {
        if !(qi.iter().all(|x| x.is_finite()) && wi.iter().all(|x| x.is_finite())) {
            return Err(config(format!("initial data for body {} must be finite", i + 1)));
        }
        if init.repair {
            continue;
        }
        let norm_err = (qi.norm() - 1.0).abs();
        if norm_err > tol::UNIT_NORM {
            return Err(config(format!(
                "initial direction of body {} has norm {:.6}, not 1 \
                 (set initial.repair = true to renormalize)",
                i + 1,
                qi.norm()
            )));
        }
        let tan_err = qi.dot(wi).abs() / qi.norm().max(1e-300);
        if tan_err > tol::TANGENCY {
            return Err(config(format!(
                "initial angular velocity of body {} is not orthogonal to its direction \
                 (q.w = {:.3e}; set initial.repair = true to re-project)",
                i + 1,
                qi.dot(wi)
            )));
        }
    }
    let initial = if init.repair {
        SystemState::repaired(q, w, Representation::Omega, 0.0)
    } else {
        SystemState::new(q, w, Representation::Omega, 0.0)
    }
    .map_err(|e| config(format!("initial: {e}")))?;

    let r = &scenario.run;
    let formulation = match r.formulation.as_str() {
        "qdot" => Representation::Velocity,
        "omega" => Representation::Omega,
        "mu" => Representation::MomentumMu,
        "pi" => Representation::MomentumPi,
        other => {
            return Err(config(format!(
                "run.formulation \"{other}\" unknown, expected qdot, omega, mu or pi"
            )))
        }
    };
    let method = match r.method.as_str() {
        "rk4" => Method::Rk4,
        "heun" => Method::Heun,
        "euler" => Method::Euler,
        other => {
            return Err(config(format!(
                "run.method \"{other}\" unknown, expected rk4, heun or euler"
            )))
        }
    };
    if r.trajectory.is_empty() || r.summary.is_empty() {
        return Err(config("run.trajectory and run.summary must be nonempty file names"));
    }
    let spec = IntegratorSpec::new(method, r.step, r.horizon, Repair::Project)
        .map_err(|e| config(format!("run: {e}")))?;

    let t = &scenario.tolerances;
    for (name, value) in [
        ("hat_identity", t.hat_identity),
        ("kinematic_round_trip", t.kinematic_round_trip),
        ("momentum_round_trip", t.momentum_round_trip),
        ("cross_form", t.cross_form),
        ("stationarity", t.stationarity),
        ("compare_bound", t.compare_bound),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(config(format!("tolerances.{name} must be positive and finite")));
        }
    }

    Ok(Loaded { scenario, chain, forces, initial, formulation, spec })
}

/// Short token for file suffixes and CSV column names.
pub fn short_label(rep: Representation) -> &'static str {
    match rep {
        Representation::Velocity => "qdot",
        Representation::Omega => "omega",
        Representation::MomentumMu => "mu",
        Representation::MomentumPi => "pi",
    }
}
