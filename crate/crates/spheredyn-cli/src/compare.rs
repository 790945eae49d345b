//! The `compare` subcommand: integrate every formulation from the same
//! physical state and see how far the base points drift apart.

use std::path::Path;

use spheredyn::variational::integrate_all_forms;

use crate::config::{load, short_label};
use crate::output::{divergence_csv, fmt_value, trajectory_csv, write_atomic};
use crate::{dynamics_failure, Failure};

pub fn cmd_compare(config_path: &Path, out_dir: &Path, quiet: bool) -> Result<(), Failure> {
    let loaded = load(config_path)?;
    let comparison =
        integrate_all_forms(&loaded.chain, &loaded.forces, &loaded.spec, &loaded.initial)
            .map_err(dynamics_failure)?;

    let stem = Path::new(&loaded.scenario.run.trajectory)
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("compare")
        .to_string();
    for (rep, traj) in comparison.representations.iter().zip(&comparison.trajectories) {
        let path = out_dir.join(format!("{stem}_{}.csv", short_label(*rep)));
        write_atomic(&path, &trajectory_csv(traj))?;
        if !quiet {
            let r = traj.summary();
            println!(
                "{:<6} energy drift {:.3e}, constraint errors {:.3e} / {:.3e}",
                short_label(*rep),
                r.max_energy_drift,
                r.max_norm_error,
                r.max_tangency_error
            );
        }
    }
    let div_path = out_dir.join(format!("{stem}_divergence.csv"));
    write_atomic(&div_path, &divergence_csv(&comparison.times, &comparison.divergence))?;

    let max = comparison.max_divergence();
    let bound = loaded.scenario.tolerances.compare_bound;
    if !quiet {
        println!("max divergence {} (bound {:.3e})", fmt_value(max), bound);
        println!("wrote {}", div_path.display());
    }
    if max <= bound {
        Ok(())
    } else {
        Err(Failure::Verdict(format!(
            "formulations diverge by {max:.3e}, above the configured bound {bound:.3e}"
        )))
    }
}
