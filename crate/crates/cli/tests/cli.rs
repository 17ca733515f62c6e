//! End-to-end tests of the binary: output shapes, determinism, and the
//! documented exit codes (0 ok, 2 validation, 3 inapplicable, 4 numeric).

use std::process::{Command, Output};

fn lrps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrps"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_prints_coefficients_and_closed_form() {
    let out = lrps(&["solve", "--example", "2", "--gamma", "1/2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p[0] = z1"));
    assert!(text.contains("p[8] = z1"));
    assert!(text.contains("closed form: (z1) * E_gamma(1 * t^gamma)"));
}

#[test]
fn solve_json_is_parseable() {
    let out = lrps(&["solve", "--example", "6", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["coefficients"][1], "-z1^2");
    assert_eq!(doc["closed_form"]["ratio"], "-1");
}

#[test]
fn table_csv_is_deterministic_and_well_formed() {
    let args = [
        "table",
        "--example",
        "2",
        "--points",
        "0.5",
        "--times",
        "0.15,0.9",
    ];
    let a = lrps(&args);
    let b = lrps(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma,z1,tau,value,exact,abs_error,rel_error"
    );
    assert_eq!(lines.clone().count(), 2);
    for line in lines {
        assert_eq!(line.split(',').count(), 7);
    }
}

#[test]
fn order_sweep_has_one_column_per_order() {
    let out = lrps(&[
        "order-sweep",
        "--example",
        "8",
        "--times",
        "0.1,0.5",
        "--orders",
        "4,6,8",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("gamma,z1,z2,z3,tau,abs_error_k4,abs_error_k6,abs_error_k8\n"));
}

#[test]
fn residual_check_reports_structural_zero() {
    let out = lrps(&["residual-check", "--example", "1", "--gammas", "1/2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("residual structurally zero (terminated early)"));
}

#[test]
fn exit_code_validation_error() {
    let out = lrps(&["solve", "--example", "2", "--gamma", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lrps(&["solve", "--example", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lrps(&["table", "--example", "2", "--times", "0.9,0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_inapplicable() {
    let out = lrps(&["solve", "--example", "s6b", "--gamma", "4/5"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(text.contains("k = 3"));
    let out = lrps(&["residual-check", "--example", "s6b", "--gammas", "1/2,4/5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn problem_file_round_trip_through_solver() {
    let dir = std::env::temp_dir().join("lrps-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("problem.json");
    std::fs::write(
        &path,
        r#"{
            "dimension": 1,
            "gamma": "1/2",
            "order": 6,
            "initial": "z1",
            "drift": [{"i": 1, "linear": "-1"}],
            "diffusion": [{"i": 1, "j": 1, "linear": "1"}]
        }"#,
    )
    .unwrap();
    let out = lrps(&["solve", "--problem", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p[1] = 1"));
    assert!(text.contains("order = 6"));

    // value-only table works without a closed-form reference;
    // error columns are rejected
    let out = lrps(&[
        "table",
        "--problem",
        path.to_str().unwrap(),
        "--times",
        "0.5",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("gamma,z1,tau,value\n"));
    let out = lrps(&[
        "table",
        "--problem",
        path.to_str().unwrap(),
        "--times",
        "0.5",
        "--columns",
        "abs_error",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = lrps(&["solve", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_problem_files_solve() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../..");
    let linear = format!("{root}/problems/linear_1d.json");
    let out = lrps(&["solve", "--problem", &linear]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("closed form: terminating series"));

    let nonlinear = format!("{root}/problems/nonlinear_2d.json");
    let out = lrps(&["solve", "--problem", &nonlinear, "--gamma", "1/2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("p[1] = -z1^2"));
    assert!(text.contains("E_gamma(-1 * t^gamma)"));
}

#[test]
fn examples_lists_all_builtins() {
    let out = lrps(&["examples"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in ["1", "2", "4", "5", "6", "7", "8", "s6a", "s6b"] {
        assert!(
            text.lines().any(|l| l.trim().starts_with(id)),
            "missing {id}"
        );
    }
}
