//! End-to-end runs of the `rqet` binary.

use std::path::Path;
use std::process::{Command, Output};

use rqet_core::io::{parse_perturb_csv, parse_report_csv};
use rqet_core::qsp::pade2_phases;
use serde_json::Value;

fn rqet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqet")).args(args).env_remove("RQET_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn phases_level_one_is_the_closed_form_set() {
    let o = rqet(&["phases", "--pade-l", "2", "--iters", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let angles: Vec<f64> = v["flattened"]["phases"]["angles"].as_array().unwrap().iter().map(|a| a.as_f64().unwrap()).collect();
    assert_eq!(angles, pade2_phases().angles());
    assert_eq!(v["base"]["form"], "reflection");
}

#[test]
fn phases_level_two_has_eight_distinct_angles() {
    let v = json(&rqet(&["phases", "--iters", "2"]));
    assert_eq!(v["flattened"]["degree"], 25);
    assert!(v["flattened"]["distinct_count"].as_u64().unwrap() <= 8);
    assert_eq!(v["flattened"]["queries"], "25");
}

#[test]
fn odd_pade_is_rejected() {
    let o = rqet(&["phases", "--pade-l", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition (ii)"));
    assert_eq!(code(&rqet(&["sign-run", "--seed", "1", "--dim", "4", "--gap", "0.5", "--pade-l", "5"])), 2);
}

#[test]
fn phases_for_l4_round_trip() {
    let v = json(&rqet(&["phases", "--pade-l", "4"]));
    assert_eq!(v["base"]["angles"].as_array().unwrap().len(), 9);
}

#[test]
fn seeded_sign_run() {
    let o = rqet(&["sign-run", "--seed", "7", "--dim", "8", "--gap", "0.5", "--epsilon", "1e-8"]);
    assert_eq!(code(&o), 0);
    let rows = parse_report_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.last().unwrap().error <= 1e-8);
    assert!(rows.iter().all(|r| r.within_bound()));
}

#[test]
fn sign_run_is_reproducible() {
    let args = ["sign-run", "--seed", "3", "--dim", "6", "--gap", "0.4", "--mode", "flattened", "--epsilon", "1e-6"];
    let strip = |o: &Output| -> Vec<String> {
        stdout(o).lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    assert_eq!(strip(&rqet(&args)), strip(&rqet(&args)));
}

#[test]
fn exact_sign_input_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[-1,0]]}"#);
    let o = rqet(&["sign-run", "--matrix", &m]);
    assert_eq!(code(&o), 0);
    let rows = parse_report_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].n, rows[0].error), (0, 0.0));
}

#[test]
fn scalar_mode_headline_run() {
    let o = rqet(&["sign-run", "--seed", "1", "--dim", "8", "--gap", "0.1", "--epsilon", "1e-10", "--mode", "scalar"]);
    assert_eq!(code(&o), 0);
    let rows = parse_report_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows.last().unwrap().queries, 390_625);
}

#[test]
fn gap_violation_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"rows": 2, "cols": 2, "entries": [[0.2,0],[0,0],[0,0],[-0.9,0]]}"#);
    let o = rqet(&["sign-run", "--matrix", &m, "--gap", "0.5"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.2"));
}

#[test]
fn bad_inputs_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"rows": 1, "cols": 1, "entries": [[NaN, 0]]}"#);
    assert_eq!(code(&rqet(&["sign-run", "--matrix", &m])), 2);
    assert_eq!(code(&rqet(&["sign-run", "--matrix", "/nonexistent.json"])), 2);
    assert_eq!(code(&rqet(&["sign-run"])), 2);
    assert_eq!(code(&rqet(&["sign-run", "--seed", "1", "--dim", "4", "--gap", "0.5", "--mode", "bogus"])), 2);
    assert_eq!(code(&rqet(&["perturb", "--seed", "1", "--dim", "4", "--gap", "0.5", "--delta-grid", "0:1:2"])), 2);
}

#[test]
fn normalize_flag() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"rows": 2, "cols": 2, "entries": [[1.2,0],[0,0],[0,0],[-1.8,0]]}"#);
    assert_eq!(code(&rqet(&["sign-run", "--matrix", &m, "--gap", "0.5"])), 3);
    let o = rqet(&["sign-run", "--matrix", &m, "--normalize", "--gap", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("normalization factor 1.8"));
}

#[test]
fn iteration_cap_reports_numeric_failure() {
    let o = rqet(&["sign-run", "--seed", "2", "--dim", "4", "--gap", "0.5", "--iters", "1"]);
    assert_eq!(code(&o), 4);
    assert_eq!(parse_report_csv(&stdout(&o)).unwrap().len(), 1);
}

#[test]
fn polar_on_unitary_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "u.json", r#"{"rows": 2, "cols": 2, "entries": [[0,0],[1,0],[1,0],[0,0]]}"#);
    let o = rqet(&["polar-run", "--matrix", &m, "--gap", "0.5"]);
    assert_eq!(code(&o), 0);
    let rows = parse_report_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].error, 0.0);
}

#[test]
fn seeded_polar_run() {
    let o = rqet(&["polar-run", "--seed", "4", "--dim", "8", "--gap", "0.5", "--epsilon", "1e-8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(parse_report_csv(&stdout(&o)).unwrap().len(), 4);
}

#[test]
fn conditions_on_p1() {
    let v = json(&rqet(&["conditions", "--pade-l", "1"]));
    assert_eq!(v["bounded_inside"], true);
    assert_eq!(v["dominating_outside"], false);
    assert_eq!(v["accepted"], false);
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t2.json", r#"{"coeffs": [[-1,0],[0,0],[2,0]], "parity": "even"}"#);
    assert_eq!(json(&rqet(&["conditions", "--poly", &p]))["accepted"], true);
}

#[test]
fn perturb_baseline_row() {
    let base = ["--seed", "5", "--dim", "4", "--gap", "0.5"];
    let mut args = vec!["perturb"];
    args.extend(base);
    args.extend(["--delta-grid", "1e-4:1e-2:3"]);
    let o = rqet(&args);
    assert_eq!(code(&o), 0);
    let rows = parse_perturb_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0].delta, rows[0].deviation), (0.0, 0.0));
    assert_eq!(rows[1].delta, 1e-4);
    let ratio = rows[2].deviation / rows[1].deviation;
    assert!((9.0..=11.0).contains(&ratio), "{ratio}");

    let mut sargs = vec!["sign-run"];
    sargs.extend(base);
    sargs.extend(["--iters", "1"]);
    let sign = parse_report_csv(&stdout(&rqet(&sargs))).unwrap();
    assert_eq!(sign[0].error, rows[0].error);
}

#[test]
fn tolerance_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_rqet")).args(["phases"]).env("RQET_TOL", "1e-6").output().unwrap();
    assert_eq!(json(&o)["tolerance"], 1e-6);
    assert_eq!(json(&rqet(&["phases"]))["tolerance"], 1e-9);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = rqet(&["sign-run", "--seed", "1", "--dim", "4", "--gap", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert!(!parse_report_csv(&std::fs::read_to_string(out).unwrap()).unwrap().is_empty());
}
