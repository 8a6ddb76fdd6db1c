//! End-to-end tests driving the `chandisc` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chandisc"))
}

fn write_instance(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("chandisc-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn classical_instance() -> PathBuf {
    write_instance(
        "classical.json",
        r#"{
            "name": "classical-example",
            "p": 0.5,
            "epsilon": 0.01,
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.1], [0.9, 0.1]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2], [0.8, 0.2]]}
            ]
        }"#,
    )
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn bounds_symmetric_matches_worked_example() {
    let out = bin()
        .args(["bounds-symmetric", "--no-timestamp", "--instance"])
        .arg(classical_instance())
        .output()
        .unwrap();
    let v = stdout_json(&out);
    let entries = v["report"]["entries"].as_array().unwrap();
    let find = |name: &str| -> &serde_json::Value {
        entries
            .iter()
            .find(|e| e["name"] == name)
            .unwrap_or_else(|| panic!("missing bound {name}"))
    };
    let lower = find("lower/geometric_fidelity")["value"].as_f64().unwrap();
    assert!((lower - 159.8).abs() < 0.2, "F-hat lower {lower}");
    let upper = find("upper/holevo_s_half")["value"].as_f64().unwrap();
    assert_eq!(upper, 388.0);
}

#[test]
fn reports_are_byte_identical_with_fixed_seed() {
    let run = || {
        bin()
            .args([
                "bounds-symmetric",
                "--no-timestamp",
                "--seed",
                "42",
                "--instance",
            ])
            .arg(classical_instance())
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reports differ between identical runs");
}

#[test]
fn malformed_instance_exits_2_naming_the_invariant() {
    let path = write_instance(
        "malformed.json",
        r#"{
            "p": 0.5, "epsilon": 0.01,
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.2]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2]]}
            ]
        }"#,
    );
    let out = bin()
        .args(["bounds-symmetric", "--instance"])
        .arg(path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("row stochastic"), "stderr: {err}");
}

#[test]
fn capacity_errors_exit_3() {
    // dim-3 states force the dense tensor-power path; 3^12 exceeds the budget
    let path = write_instance(
        "qutrit_states.json",
        r#"{
            "p": 0.5, "epsilon": 0.000001,
            "states": [
                {"kind": "state", "matrix": [[[0.5,0],[0.1,0],[0,0]],[[0.1,0],[0.3,0],[0,0]],[[0,0],[0,0],[0.2,0]]]},
                {"kind": "state", "matrix": [[[0.2,0],[0,0.1],[0,0]],[[0,-0.1],[0.5,0],[0,0]],[[0,0],[0,0],[0.3,0]]]}
            ]
        }"#,
    );
    let out = bin()
        .args(["oracle-nstar", "--n-max", "12", "--instance"])
        .arg(path)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("capacity"), "stderr: {err}");
}

#[test]
fn oracle_lands_inside_the_bounds() {
    let out = bin()
        .args([
            "oracle-nstar",
            "--n-max",
            "500",
            "--no-timestamp",
            "--instance",
        ])
        .arg(classical_instance())
        .output()
        .unwrap();
    let v = stdout_json(&out);
    let n_star = v["report"]["n_star"].as_u64().unwrap();
    assert!((160..=388).contains(&n_star), "n* = {n_star}");
}

#[test]
fn verify_sandwich_all_rows_ok() {
    let out = bin()
        .args([
            "verify-sandwich",
            "--count",
            "6",
            "--seed",
            "11",
            "--format",
            "csv",
            "--no-timestamp",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert!(row.contains(",true,"), "row failed: {row}");
    }
}

#[test]
fn sweep_lower_bound_is_monotone_in_epsilon() {
    let path = write_instance(
        "sweep.json",
        r#"{
            "p": 0.5,
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.1], [0.9, 0.1]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2], [0.8, 0.2]]}
            ],
            "sweep": {"variable": "epsilon", "values": [0.1, 0.01, 0.001, 0.0001]}
        }"#,
    );
    let out = bin()
        .args(["sweep", "--no-timestamp", "--instance"])
        .arg(&path)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    let points = v["report"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    let lowers: Vec<f64> = points
        .iter()
        .map(|p| p["report"]["best_lower"].as_f64().unwrap())
        .collect();
    for w in lowers.windows(2) {
        assert!(w[1] >= w[0], "lower bound not monotone: {lowers:?}");
    }
}

#[test]
fn sweep_p_grid_keeps_lambda_star_in_range() {
    let path = write_instance(
        "sweep_p.json",
        r#"{
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.1], [0.9, 0.1]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2], [0.8, 0.2]]}
            ],
            "sweep": {"variable": "p", "values": [0.05, 0.2, 0.35, 0.5]}
        }"#,
    );
    let out = bin()
        .args(["sweep", "--no-timestamp", "--instance"])
        .arg(&path)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    for point in v["report"]["points"].as_array().unwrap() {
        let lam = point["lambda_star"].as_f64().unwrap();
        assert!((0.5..1.0).contains(&lam), "lambda* {lam}");
    }
}

#[test]
fn empty_sweep_grid_exits_2() {
    let path = write_instance(
        "sweep_empty.json",
        r#"{
            "p": 0.5,
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.1], [0.9, 0.1]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2], [0.8, 0.2]]}
            ],
            "sweep": {"variable": "epsilon", "values": []}
        }"#,
    );
    let out = bin()
        .args(["sweep", "--instance"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_validates_against_published_schema() {
    // structural validation against docs/report.schema.json
    let schema_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();

    let out = bin()
        .args(["bounds-symmetric", "--no-timestamp", "--instance"])
        .arg(classical_instance())
        .output()
        .unwrap();
    let v = stdout_json(&out);
    for key in required {
        assert!(v.get(key).is_some(), "report is missing required key {key}");
    }
    // entry objects carry the documented fields
    for e in v["report"]["entries"].as_array().unwrap() {
        for field in [
            "name",
            "direction",
            "value",
            "applicable",
            "certified",
            "method",
        ] {
            assert!(e.get(field).is_some(), "entry missing {field}");
        }
    }
}

#[test]
fn mary_and_asymmetric_commands_run() {
    let mary = write_instance(
        "mary.json",
        r#"{
            "epsilon": 0.01,
            "priors": [0.4, 0.35, 0.25],
            "channels": [
                {"kind": "classical", "stochastic": [[0.9, 0.1], [0.9, 0.1]]},
                {"kind": "classical", "stochastic": [[0.8, 0.2], [0.8, 0.2]]},
                {"kind": "classical", "stochastic": [[0.55, 0.45], [0.55, 0.45]]}
            ]
        }"#,
    );
    let out = bin()
        .args(["bounds-mary", "--no-timestamp", "--instance"])
        .arg(&mary)
        .output()
        .unwrap();
    let v = stdout_json(&out);
    let bl = v["report"]["best_lower"].as_f64().unwrap();
    let bu = v["report"]["best_upper"].as_f64().unwrap();
    assert!(bl > 0.0 && bl <= bu + 1.0);

    let out = bin()
        .args([
            "bounds-asymmetric",
            "--eps",
            "0.01",
            "--delta",
            "0.01",
            "--no-timestamp",
            "--instance",
        ])
        .arg(classical_instance())
        .output()
        .unwrap();
    let v = stdout_json(&out);
    assert!(v["report"]["best_lower"].as_f64().unwrap() > 0.0);
}
