//! Trajectory CSV and summary JSON emission.
//!
//! Every number is written with 17 significant digits, which is enough
//! for a re-parse to reproduce the exact bits of the original double.
//! Files are written to a sibling temp name and renamed into place, so
//! a failed run never leaves a partial file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use spheredyn::integrator::Trajectory;

use crate::config::short_label;
use crate::Failure;

pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

fn tmp_name(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = tmp_name(path);
    let attempt = (|| -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        fs::rename(&tmp, path)
    })();
    attempt.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Failure::Io(format!("cannot write {}: {e}", path.display()))
    })
}

/// Column layout: `t`, then per body the three components of `q` and of
/// the companion vector, then `energy`, `max_norm_err`, `max_tan_err`.
/// 1 + 6n + 3 columns in total.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let first = &traj.samples[0];
    let n = first.n();
    let w = short_label(first.rep());
    let mut text = String::from("t");
    for i in 1..=n {
        for axis in ["x", "y", "z"] {
            text.push_str(&format!(",q{i}{axis}"));
        }
        for axis in ["x", "y", "z"] {
            text.push_str(&format!(",{w}{i}{axis}"));
        }
    }
    text.push_str(",energy,max_norm_err,max_tan_err\n");
    for (s, d) in traj.samples.iter().zip(&traj.diagnostics) {
        text.push_str(&fmt_value(s.time()));
        for i in 0..n {
            for c in 0..3 {
                text.push(',');
                text.push_str(&fmt_value(s.q()[i][c]));
            }
            for c in 0..3 {
                text.push(',');
                text.push_str(&fmt_value(s.w()[i][c]));
            }
        }
        for v in [d.energy, d.max_norm_error, d.max_tangency_error] {
            text.push(',');
            text.push_str(&fmt_value(v));
        }
        text.push('\n');
    }
    text
}

pub fn divergence_csv(times: &[f64], divergence: &[f64]) -> String {
    let mut text = String::from("t,divergence\n");
    for (t, d) in times.iter().zip(divergence) {
        text.push_str(&fmt_value(*t));
        text.push(',');
        text.push_str(&fmt_value(*d));
        text.push('\n');
    }
    text
}
