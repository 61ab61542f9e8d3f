use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use rebit_ring::numerics::{write_state, CMatrix2, StateFile};
use rebit_ring::qubitext::twisted_werner;
use rebit_ring::ring::six_rebit_state;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rebit-ring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).expect("JSON output")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn kmax_table() {
    let out = run(&["kmax", "--n", "6", "--theta-grid", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,theta,kmax_closed,kmax_mixture,kmax_asymptotic");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "6,0,0.666666667,0.666666667,");
}

#[test]
fn kmax_asymptotic_column() {
    let text = stdout(&run(&["kmax", "--n", "200", "--theta-grid", "2", "--asymptotic"]));
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3], "");
        let closed: f64 = cells[2].parse().unwrap();
        let asym: f64 = cells[4].parse().unwrap();
        assert!((closed - asym).abs() < 1e-5);
    }
}

#[test]
fn six_rebit_example() {
    let v = json(&run(&["six-rebit", "--phi", "0.5235988"]));
    assert!((v["theta"].as_f64().unwrap() - PI).abs() < 1e-6);
    assert!((v["k"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn verify_all_passes() {
    let v = json(&run(&["verify-all", "--n-max", "7", "--seed", "1"]));
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["seed"], Value::from(1));
    let criteria: Vec<u64> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["criterion"].as_u64().unwrap())
        .collect();
    for k in 1..=8 {
        assert!(criteria.contains(&k), "criterion {k} missing");
    }
    assert!(v["notes"][0].as_str().unwrap().starts_with("criterion 9"));
}

#[test]
fn output_is_repeatable() {
    let args = ["ring-verify", "--n-max", "5", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["qubit-ring", "--xi-grid", "7"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["kmax", "--n", "6", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["kmax", "--n", "1"]).status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "kind": "pure", "data": [[1, 0]]}"#).unwrap();
    assert_eq!(run(&["fef", "--state", path_arg(&bad)]).status.code(), Some(3));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(
        run(&["transport", "--state", path_arg(&bad), "--link", "0,1"])
            .status
            .code(),
        Some(3)
    );

    let failing = run(&["ring-verify", "--n-max", "4", "--tolerance", "1e-30"]);
    assert_eq!(failing.status.code(), Some(1));
    assert_eq!(json_unchecked(&failing)["pass"], Value::Bool(false));
}

fn json_unchecked(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("JSON output")
}

#[test]
fn transport_of_stored_state() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("six.json");
    write_state(&path, &StateFile::from_pure(&six_rebit_state(0.4))).unwrap();
    let v = json(&run(&["transport", "--state", path_arg(&path), "--link", "2,3"]));
    assert!((v["xi"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((v["correlation"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn fef_of_stored_werner_state() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("werner.json");
    let rho = twisted_werner(0.6, &CMatrix2::identity()).unwrap();
    write_state(&path, &StateFile::from_mixed(&rho)).unwrap();
    let v = json(&run(&["fef", "--state", path_arg(&path)]));
    assert!((v["f"].as_f64().unwrap() - 0.7).abs() < 1e-12);
    assert!((v["correlation"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert_eq!(v["unique"], Value::Bool(true));
    assert!((v["rotation"][0][0][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn lattice_twist_and_mixture() {
    let v = json(&run(&[
        "lattice2d",
        "twist",
        "--rows",
        "2",
        "--cols",
        "3",
        "--link",
        "0,1",
        "--phi",
        "-0.5",
    ]));
    assert_eq!(v["report"]["pass"], Value::Bool(true));
    let phase = v["report"]["links"][0]["phase"].as_f64().unwrap();
    assert!((phase - (2.0 * PI - 0.5)).abs() < 1e-9);
    assert_eq!(
        run(&[
            "lattice2d",
            "twist",
            "--rows",
            "2",
            "--cols",
            "3",
            "--link",
            "0,4",
            "--xi",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );

    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"0,1": 0.3, "2,3": -1.0, "0,2": 2.0, "1,3": 0.0}"#).unwrap();
    let out_file = dir.path().join("report.json");
    let out = run(&[
        "lattice2d",
        "mixture",
        "--rows",
        "2",
        "--cols",
        "2",
        "--config",
        path_arg(&config),
        "--out",
        path_arg(&out_file),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(v["report"]["pass"], Value::Bool(true));
    assert_eq!(v["report"]["fully_connected"], Value::Bool(true));
    assert!((v["k"].as_f64().unwrap() - 0.5).abs() < 1e-12);

    std::fs::write(&config, r#"{"0,1": 0.3}"#).unwrap();
    assert_eq!(
        run(&[
            "lattice2d",
            "mixture",
            "--rows",
            "2",
            "--cols",
            "2",
            "--config",
            path_arg(&config)
        ])
        .status
        .code(),
        Some(3)
    );
}
