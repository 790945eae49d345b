//! The `check` subcommand: randomized numerical self-checks run against
//! the scenario's own model, step and horizon.
//!
//! Five checks: the rotation-kernel algebra, the two kinematic maps,
//! the velocity/momentum round trips, agreement of the four
//! formulations over the configured run, and the stationarity defect of
//! a finely integrated trajectory under random variations. Bounds come
//! from `[tolerances]`, so a scenario can tighten them deliberately.

use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spheredyn::hamiltonian::convert;
use spheredyn::integrator::{integrate, IntegratorSpec, Method, Repair};
use spheredyn::sample;
use spheredyn::so3::identity_residuals;
use spheredyn::sphere::{convert_kinematic, Representation};
use spheredyn::variational::{cross_form_agreement, dalembert_residual, VariationCurve};

use crate::config::load;
use crate::{dynamics_failure, Failure};

struct CheckRow {
    name: &'static str,
    worst: f64,
    bound: f64,
}

impl CheckRow {
    fn pass(&self) -> bool {
        self.worst <= self.bound
    }
}

/// Duration of the fine-step trajectory used for the stationarity
/// check; kept short so the check stays interactive.
const STATIONARITY_WINDOW: f64 = 1.0;
const STATIONARITY_STEP: f64 = 1e-4;

pub fn cmd_check(config_path: &Path, seed: u64, quiet: bool) -> Result<(), Failure> {
    let loaded = load(config_path)?;
    let chain = &loaded.chain;
    let n = chain.masses().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = sample::box_vector(&mut rng, 2.0);
        let y = sample::box_vector(&mut rng, 2.0);
        let z = sample::box_vector(&mut rng, 2.0);
        worst = worst.max(identity_residuals(&x, &y, &z).max());
    }
    rows.push(CheckRow {
        name: "rotation kernel identities",
        worst,
        bound: loaded.scenario.tolerances.hat_identity,
    });

    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let s = sample::state(&mut rng, n, Representation::Velocity, 1.5, 0.0);
        let o = convert_kinematic(&s, Representation::Omega).map_err(dynamics_failure)?;
        let back = convert_kinematic(&o, Representation::Velocity).map_err(dynamics_failure)?;
        for i in 0..n {
            worst = worst.max((back.w()[i] - s.w()[i]).norm());
        }
    }
    rows.push(CheckRow {
        name: "velocity round trips",
        worst,
        bound: loaded.scenario.tolerances.kinematic_round_trip,
    });

    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let s = sample::state(&mut rng, n, Representation::Velocity, 1.5, 0.0);
        for rep in [Representation::MomentumMu, Representation::MomentumPi] {
            let p = convert(chain, &s, rep).map_err(dynamics_failure)?;
            let back = convert(chain, &p, Representation::Velocity).map_err(dynamics_failure)?;
            for i in 0..n {
                worst = worst.max((back.w()[i] - s.w()[i]).norm());
            }
        }
    }
    rows.push(CheckRow {
        name: "momentum round trips",
        worst,
        bound: loaded.scenario.tolerances.momentum_round_trip,
    });

    let divergence = cross_form_agreement(chain, &loaded.forces, &loaded.spec, &loaded.initial)
        .map_err(dynamics_failure)?;
    rows.push(CheckRow {
        name: "formulation agreement",
        worst: divergence,
        bound: loaded.scenario.tolerances.cross_form,
    });

    let window = loaded.spec.horizon().min(STATIONARITY_WINDOW);
    let fine = IntegratorSpec::new(Method::Rk4, STATIONARITY_STEP, window, Repair::Project)
        .map_err(dynamics_failure)?;
    let start =
        convert(chain, &loaded.initial, Representation::Velocity).map_err(dynamics_failure)?;
    let traj = integrate(chain, &loaded.forces, &fine, &start).map_err(dynamics_failure)?;
    let curves: Vec<VariationCurve> = (0..20)
        .map(|_| VariationCurve::random(&mut rng, n, 0.0, window, 1.0))
        .collect::<Result<_, _>>()
        .map_err(dynamics_failure)?;
    let residual = dalembert_residual(chain, &loaded.forces, &traj.samples, &curves)
        .map_err(dynamics_failure)?;
    rows.push(CheckRow {
        name: "stationarity residual",
        worst: residual,
        bound: loaded.scenario.tolerances.stationarity,
    });

    let mut failures = 0;
    for row in &rows {
        if !row.pass() {
            failures += 1;
        }
        if !quiet {
            println!(
                "{:<28} max {:9.3e}   bound {:9.3e}   {}",
                row.name,
                row.worst,
                row.bound,
                if row.pass() { "pass" } else { "FAIL" }
            );
        }
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(Failure::Verdict(format!("{failures} of {} checks failed", rows.len())))
    }
}
