//! End-to-end tests of the command-line contract: the shipped scenario
//! files work, schema violations are rejected with useful messages and
//! the documented exit codes, and trajectory files round-trip exactly.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spheredyn"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn shipped_text(name: &str) -> String {
    fs::read_to_string(shipped(name)).expect("shipped config readable")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.args(args).arg("--output-dir").arg(dir);
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn report(num: u32, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("acceptance {num:02} {name}: {verdict} ({detail})");
    assert!(ok, "acceptance criterion {num} failed: {detail}");
}

#[test]
fn acceptance_11_cli_contract() {
    let dir = tempfile::tempdir().unwrap();

    let run = run_in(dir.path(), &["run", shipped("double_pendulum.toml").to_str().unwrap()]);
    let check = run_in(
        dir.path(),
        &["check", shipped("check.toml").to_str().unwrap(), "--seed", "11"],
    );
    let compare = run_in(dir.path(), &["compare", shipped("compare.toml").to_str().unwrap()]);
    let shipped_ok = code(&run) == 0 && code(&check) == 0 && code(&compare) == 0;

    let bad_norm = write_config(
        dir.path(),
        "bad_norm.toml",
        &shipped_text("double_pendulum.toml")
            .replace("[[0.6, 0.0, -0.8]", "[[0.72, 0.0, -0.96]"),
    );
    let bad_norm_out = run_in(dir.path(), &["run", bad_norm.to_str().unwrap()]);
    let names_index = code(&bad_norm_out) == 2 && stderr(&bad_norm_out).contains("body 1");

    let bad_step = write_config(
        dir.path(),
        "bad_step.toml",
        &shipped_text("double_pendulum.toml").replace("horizon = 5.0", "horizon = 0.0005"),
    );
    let bad_step_out = run_in(dir.path(), &["run", bad_step.to_str().unwrap()]);
    let step_rejected = code(&bad_step_out) == 2;

    let csv = fs::read_to_string(dir.path().join("double_pendulum.csv")).unwrap();
    let mut lines = csv.lines();
    let header_cols = lines.next().unwrap().split(',').count();
    let mut rows = 0usize;
    let mut columns_ok = header_cols == 1 + 6 * 2 + 3;
    let mut round_trip_ok = true;
    for line in lines {
        rows += 1;
        let fields: Vec<&str> = line.split(',').collect();
        columns_ok &= fields.len() == header_cols;
        for field in fields {
            let x: f64 = field.parse().expect("numeric field");
            round_trip_ok &= format!("{x:.16e}") == field;
        }
    }

    let ok = shipped_ok && names_index && step_rejected && columns_ok && round_trip_ok && rows > 0;
    report(
        11,
        "cli contract",
        ok,
        &format!(
            "shipped configs exit 0: {shipped_ok}, index-specific rejection: {names_index}, \
             step>horizon rejected: {step_rejected}, {header_cols} columns over {rows} rows: \
             {columns_ok}, exact numeric round trip: {round_trip_ok}"
        ),
    );
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", dir.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("absent.toml"));
}

#[test]
fn unparseable_config_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "garbage.toml", "schema_version = \"unclosed\n");
    let out = run_in(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 1"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text("double_pendulum.toml") + "\n[run.extra]\nknob = 1\n";
    let path = write_config(dir.path(), "unknown.toml", &text);
    let out = run_in(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn non_orthogonal_angular_velocity_is_rejected_with_body_number() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text("double_pendulum.toml")
        .replace("[0.1, -0.5, 0.0]", "[0.1, -0.5, 0.3]");
    let path = write_config(dir.path(), "tilted.toml", &text);
    let out = run_in(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("body 2"));
}

#[test]
fn repair_flag_accepts_denormalized_input() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text("double_pendulum.toml")
        .replace("[[0.6, 0.0, -0.8]", "[[0.72, 0.0, -0.96]")
        .replace("[initial]", "[initial]\nrepair = true");
    let path = write_config(dir.path(), "repaired.toml", &text);
    let out = run_in(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn numerical_failure_exits_3_and_leaves_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let text = "schema_version = 1\n\
                [model]\n\
                kind = \"chain_pendulum\"\n\
                n = 1\n\
                masses = [1.0]\n\
                lengths = [1.0]\n\
                gravity = 1000.0\n\
                [initial]\n\
                q = [[1.0, 0.0, 0.0]]\n\
                omega = [[0.0, 0.0, 0.0]]\n\
                [run]\n\
                formulation = \"qdot\"\n\
                method = \"euler\"\n\
                step = 0.1\n\
                horizon = 10.0\n";
    let path = write_config(dir.path(), "diverge.toml", text);
    let out_dir = dir.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    let out = run_in(&out_dir, &["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("diverged"));
    assert_eq!(fs::read_dir(&out_dir).unwrap().count(), 0, "no partial output files");
}

#[test]
fn corrupted_tolerance_makes_check_fail() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text("check.toml") + "\n[tolerances]\nhat_identity = 1e-30\n";
    let path = write_config(dir.path(), "strict.toml", &text);
    let out = run_in(dir.path(), &["check", path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn loose_step_comparison_breaks_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let text = shipped_text("compare.toml").replace("step = 1e-3", "step = 0.05");
    let path = write_config(dir.path(), "loose.toml", &text);
    let out = run_in(dir.path(), &["compare", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("bound"));
}

#[test]
fn equilibrium_single_body_scenario_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let text = "schema_version = 1\n\
                [model]\n\
                kind = \"chain_pendulum\"\n\
                n = 1\n\
                masses = [1.0]\n\
                lengths = [1.0]\n\
                gravity = 9.81\n\
                [initial]\n\
                q = [[0.0, 0.0, -1.0]]\n\
                omega = [[0.0, 0.0, 0.0]]\n\
                [run]\n\
                formulation = \"omega\"\n\
                method = \"rk4\"\n\
                step = 1e-3\n\
                horizon = 1.0\n";
    let path = write_config(dir.path(), "rest.toml", text);
    let out = run_in(dir.path(), &["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn environment_variable_sets_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let env_dir = dir.path().join("from_env");
    fs::create_dir(&env_dir).unwrap();
    let out = bin()
        .args(["run", shipped("double_pendulum.toml").to_str().unwrap(), "--quiet"])
        .env("SPHEREDYN_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(env_dir.join("double_pendulum.csv").exists());

    let flag_dir = dir.path().join("from_flag");
    fs::create_dir(&flag_dir).unwrap();
    let out = bin()
        .args(["run", shipped("double_pendulum.toml").to_str().unwrap(), "--quiet"])
        .arg("--output-dir")
        .arg(&flag_dir)
        .env("SPHEREDYN_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(flag_dir.join("double_pendulum.csv").exists(), "flag beats environment");
}

#[test]
fn quiet_silences_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["run", shipped("double_pendulum.toml").to_str().unwrap(), "--quiet"],
    );
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
}

#[test]
fn summary_reports_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["run", shipped("double_pendulum_forced.toml").to_str().unwrap(), "--quiet"],
    );
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("double_pendulum_forced.json")).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(summary["formulation"], "mu");
    assert_eq!(summary["samples"], 2001);
    assert_eq!(summary["terminal"]["t"], 2.0);
    assert_eq!(summary["terminal"]["q"][1].as_array().unwrap().len(), 3);
    assert!(summary["max_energy_drift"].as_f64().unwrap().is_finite());
    assert!(summary["wall_time_seconds"].as_f64().unwrap() > 0.0);
}

#[test]
fn compare_emits_one_file_per_formulation_plus_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["compare", shipped("compare.toml").to_str().unwrap(), "--quiet"],
    );
    assert_eq!(code(&out), 0);
    for name in
        ["compare_qdot.csv", "compare_omega.csv", "compare_mu.csv", "compare_pi.csv"]
    {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let div = fs::read_to_string(dir.path().join("compare_divergence.csv")).unwrap();
    let mut lines = div.lines();
    assert_eq!(lines.next(), Some("t,divergence"));
    let (mut rows, mut max) = (0usize, 0.0f64);
    for line in lines {
        let (t, d) = line.split_once(',').unwrap();
        t.parse::<f64>().unwrap();
        max = max.max(d.parse::<f64>().unwrap());
        rows += 1;
    }
    assert_eq!(rows, 2001);
    assert!(max <= 1e-6, "divergence {max} above shipped bound");
}
