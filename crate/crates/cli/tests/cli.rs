//! End-to-end checks of the binary: flags, config files, output files,
//! exit codes and determinism.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coilphase"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn summary_map(stdout: &[u8]) -> HashMap<String, String> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn value(map: &HashMap<String, String>, key: &str) -> f64 {
    map.get(key)
        .unwrap_or_else(|| panic!("missing key {key}"))
        .parse()
        .unwrap_or_else(|_| panic!("unparseable {key}"))
}

#[test]
fn helix_info_physical_example() {
    let out = run(&["helix-info", "--pitch", "0.02", "--radius", "0.001", "--index", "1.5"]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    let gp = value(&map, "gamma_paper");
    let gd = value(&map, "gamma_derived");
    assert!((gp - 53164999087.1435).abs() / gp < 1e-12, "gamma_paper {gp}");
    assert!((gd - 59901891501.27219).abs() / gd < 1e-12, "gamma_derived {gd}");
    assert!((value(&map, "theta_derived") - 0.3043957973646151).abs() < 1e-15);
    assert!(value(&map, "wang_keiji_residual_relative") < 1e-12);
}

#[test]
fn helix_info_straight_guide_degenerates_gracefully() {
    let out = run(&["helix-info", "--pitch", "1.0", "--radius", "0", "--index", "1"]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    assert_eq!(value(&map, "theta_derived"), 0.0);
    assert_eq!(value(&map, "per_turn_geometric_phase_sigma_plus"), 0.0);
    assert_eq!(map["wang_keiji_decomposition"], "degenerate");
    assert_eq!(value(&map, "omega1"), 0.0);
}

#[test]
fn helix_info_angle_mode_coefficients() {
    let theta = (PI / 4.0).to_string();
    let out = run(&["helix-info", "--theta", &theta, "--gamma", "1"]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    assert!((value(&map, "omega1") + 0.5).abs() < 1e-15);
    assert!((value(&map, "omega0") + 0.5).abs() < 1e-15);
    assert!(value(&map, "wang_keiji_residual").abs() < 1e-16);
}

#[test]
fn simulate_full_turn_accumulates_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = run(&[
        "simulate",
        "--theta",
        "60deg",
        "--gamma",
        "2",
        "--periods",
        "1",
        "--sigma",
        "+1",
        "--spin",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let map = summary_map(&out.stdout);
    assert!((value(&map, "phase_geometric_final") - PI).abs() < 1e-8);
    assert!(value(&map, "phase_dynamical_final").abs() < 1e-9 * 2.0 * PI);
    assert!(value(&map, "closed_form_max_deviation") < 1e-8);
    assert!(value(&map, "helicity_drift") < 1e-8);

    // files exist with the pinned headers, and the summary file matches stdout
    let trajectory = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(trajectory.starts_with(
        "t,re_m+1,im_m+1,re_m0,im_m0,re_m-1,im_m-1,helicity,norm,phase_total,phase_dyn,phase_geo\n"
    ));
    let phases = std::fs::read_to_string(out_dir.join("phases.csv")).unwrap();
    assert!(phases.starts_with(
        "t,phase_total,phase_dyn,phase_geo,pancharatnam_wrapped,pancharatnam_unwrapped\n"
    ));
    let summary = std::fs::read_to_string(out_dir.join("summary.txt")).unwrap();
    assert_eq!(summary.as_bytes(), out.stdout.as_slice());
}

#[test]
fn simulate_straight_fiber_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--theta",
        "0",
        "--gamma",
        "1",
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    assert_eq!(value(&map, "phase_geometric_final"), 0.0);
    assert_eq!(value(&map, "phase_total_final"), 0.0);
    assert_eq!(value(&map, "helicity_drift"), 0.0);
}

#[test]
fn simulate_spin_half_reports_half_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--theta",
        "60deg",
        "--gamma",
        "2",
        "--spin",
        "1/2",
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    assert_eq!(map["m"], "0.5");
    assert_eq!(map["sigma_normalized"], "1");
    assert!((value(&map, "phase_geometric_final") - PI / 2.0).abs() < 1e-8);
    let trajectory = std::fs::read_to_string(dir.path().join("run/trajectory.csv")).unwrap();
    assert!(trajectory.starts_with("t,re_m+1/2,im_m+1/2,re_m-1/2,im_m-1/2,"));
}

#[test]
fn simulate_path_file_matches_analytic_run() {
    let dir = tempfile::tempdir().unwrap();
    let (theta, gamma): (f64, f64) = (PI / 3.0, 1.0);
    let period = 2.0 * PI / gamma;
    let n = 10_000usize;
    let mut text = String::from("# sampled helix\nt,x,y,z\n");
    let st = theta.sin();
    for i in 0..=n {
        let t = period * i as f64 / n as f64;
        text.push_str(&format!(
            "{},{},{},{}\n",
            t,
            st / gamma * (gamma * t).sin(),
            -st / gamma * (gamma * t).cos(),
            theta.cos() * t
        ));
    }
    let file = dir.path().join("helix.csv");
    std::fs::write(&file, text).unwrap();

    let analytic = run(&[
        "simulate",
        "--theta",
        &theta.to_string(),
        "--gamma",
        "1",
        "--out",
        dir.path().join("a").to_str().unwrap(),
    ]);
    assert!(analytic.status.success());
    let sampled = run(&[
        "simulate",
        "--path-file",
        file.to_str().unwrap(),
        "--out",
        dir.path().join("b").to_str().unwrap(),
    ]);
    assert!(
        sampled.status.success(),
        "{}",
        String::from_utf8_lossy(&sampled.stderr)
    );
    let ga = value(&summary_map(&analytic.stdout), "phase_geometric_final");
    let gs = value(&summary_map(&sampled.stdout), "phase_geometric_final");
    assert!((ga - gs).abs() < 1e-6, "analytic {ga} vs sampled {gs}");
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--theta".into(),
            "0.9".into(),
            "--gamma".into(),
            "1.5".into(),
            "--periods".into(),
            "2".into(),
            "--out".into(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(bin().args(args(&a)).output().unwrap().status.success());
    assert!(bin().args(args(&b)).output().unwrap().status.success());
    for name in ["trajectory.csv", "phases.csv", "summary.txt"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        let fb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs between identical runs");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# base configuration\ntheta = 0.5\ngamma = 1.0\nperiods = 1\n",
    )
    .unwrap();
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--theta",
        "0.25",
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let map = summary_map(&out.stdout);
    assert_eq!(value(&map, "theta"), 0.25); // flag wins
    assert_eq!(value(&map, "gamma"), 1.0); // file value survives
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "thetta = 0.5\n").unwrap();
    let out = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("thetta"));
}

#[test]
fn usage_errors_exit_two() {
    // no source at all
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    // two sources
    let out = run(&["simulate", "--theta", "1", "--gamma", "1", "--path-file", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    // unsupported spin
    let out = run(&["simulate", "--theta", "1", "--gamma", "1", "--spin", "3/2"]);
    assert_eq!(out.status.code(), Some(2));
    // steps too coarse
    let out = run(&["simulate", "--theta", "1", "--gamma", "1", "--steps-per-period", "50"]);
    assert_eq!(out.status.code(), Some(2));
    // sigma = 0 is the guarded longitudinal label
    let out = run(&["simulate", "--theta", "1", "--gamma", "1", "--sigma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("longitudinal"));
    // unknown flag: clap's own usage error
    assert_eq!(run(&["simulate", "--bogus"]).status.code(), Some(2));
    // missing physical parameter
    let out = run(&["helix-info", "--pitch", "0.02"]);
    assert_eq!(out.status.code(), Some(2));
    // paper convention without theta cannot run
    let out = run(&[
        "simulate", "--pitch", "0.02", "--radius", "0.001", "--index", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta"));
}

#[test]
fn physical_helix_runs_under_derived_convention() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--pitch",
        "0.02",
        "--radius",
        "0.001",
        "--index",
        "1.5",
        "--gamma-convention",
        "derived",
        "--out",
        dir.path().join("run").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let map = summary_map(&out.stdout);
    assert!((value(&map, "gamma") - 59901891501.27219).abs() / 6e10 < 1e-12);
    // per-turn phase for the derived cone angle
    let theta = 0.3043957973646151_f64;
    let expect = 2.0 * PI * (1.0 - theta.cos());
    assert!((value(&map, "phase_geometric_final") - expect).abs() < 1e-8);
}

#[test]
fn verify_sweep_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("verify");
    let out = run(&["verify", "--out", out_dir.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "verify failed:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("0 failed"));
    assert!(stdout.contains("PASS oracle_equivalence"));
    assert!(stdout.contains("PASS mutation_detected_by_dynamical_phase"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert_eq!(report["failed"], serde_json::json!(0));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() > 200);
    // every stdout value is present in the report: spot-check the names
    for name in [
        "oracle_equivalence",
        "dynamical_phase_rate",
        "helicity_drift",
        "geometric_phase_law",
        "wang_keiji_residual_relative",
        "motion_identity_residual",
        "geometric_vs_solid_angle",
        "ingestion_round_trip",
    ] {
        assert!(
            checks.iter().any(|c| c["name"] == *name),
            "missing check family {name}"
        );
    }
}
