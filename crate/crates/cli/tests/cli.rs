use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frac-ldg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_ops_succeeds_on_defaults() {
    let o = run(&["verify-ops", "--elements", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("checks in"));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn unknown_example_is_a_usage_error() {
    let o = run(&["convergence", "--example", "ex4", "--levels", "2:8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown experiment"));
}

#[test]
fn invalid_courant_is_rejected() {
    let o = run(&["convergence", "--example", "ex1", "--levels", "2:8", "--courant", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn overriding_a_manufactured_experiment_fails() {
    let o = run(&["soliton", "--example", "ex1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convergence_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex1");
    let o = run(&["convergence", "--example", "ex1", "--levels", "2:8,16", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("N,K,h,l2_error,observed_order"));
}

#[test]
fn solve_runs_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            r#"
[run]
degree = 2
elements = 20
final_time = 0.05
out = "{}"
[problem]
alpha = 1.7
domain = [-10.0, 10.0]
lambda = [1.0, 1.0]
nonlinearity = "cubic"
final_time = 1.0
[[initial]]
shape = "sech"
"#,
            out.display()
        ),
    )
    .unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("mass.csv").exists());
    assert!(out.join("snapshot_t0.050.csv").exists());
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[run]\ncourrant = 0.1\n").unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
