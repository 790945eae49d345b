//! The `run` subcommand: one scenario, one formulation, two files.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use spheredyn::hamiltonian::convert;
use spheredyn::integrator::integrate;

use crate::config::{load, short_label};
use crate::output::{trajectory_csv, write_atomic};
use crate::{dynamics_failure, Failure};

#[derive(Serialize)]
struct TerminalState {
    t: f64,
    q: Vec<[f64; 3]>,
    w: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct Summary {
    formulation: &'static str,
    method: &'static str,
    step: f64,
    horizon: f64,
    samples: usize,
    terminal: TerminalState,
    initial_energy: f64,
    final_energy: f64,
    max_energy_drift: f64,
    max_norm_error: f64,
    max_tangency_error: f64,
    wall_time_seconds: f64,
}

pub fn cmd_run(config_path: &Path, out_dir: &Path, quiet: bool) -> Result<(), Failure> {
    let loaded = load(config_path)?;
    let initial =
        convert(&loaded.chain, &loaded.initial, loaded.formulation).map_err(dynamics_failure)?;

    let clock = Instant::now();
    let traj = integrate(&loaded.chain, &loaded.forces, &loaded.spec, &initial)
        .map_err(dynamics_failure)?;
    let wall = clock.elapsed().as_secs_f64();

    let rollup = traj.summary();
    let last = traj.last();
    let summary = Summary {
        formulation: short_label(loaded.formulation),
        method: loaded.spec.method().label(),
        step: loaded.spec.step(),
        horizon: loaded.spec.horizon(),
        samples: rollup.samples,
        terminal: TerminalState {
            t: last.time(),
            q: last.q().iter().map(|v| [v.x, v.y, v.z]).collect(),
            w: last.w().iter().map(|v| [v.x, v.y, v.z]).collect(),
        },
        initial_energy: rollup.initial_energy,
        final_energy: rollup.final_energy,
        max_energy_drift: rollup.max_energy_drift,
        max_norm_error: rollup.max_norm_error,
        max_tangency_error: rollup.max_tangency_error,
        wall_time_seconds: wall,
    };

    let traj_path = out_dir.join(&loaded.scenario.run.trajectory);
    let summary_path = out_dir.join(&loaded.scenario.run.summary);
    write_atomic(&traj_path, &trajectory_csv(&traj))?;
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Failure::Io(format!("cannot encode summary: {e}")))?;
    write_atomic(&summary_path, &(json + "\n"))?;

    if !quiet {
        println!(
            "{} samples in {:.3} s, energy drift {:.3e}",
            rollup.samples, wall, rollup.max_energy_drift
        );
        println!("wrote {}", traj_path.display());
        println!("wrote {}", summary_path.display());
    }
    Ok(())
}
