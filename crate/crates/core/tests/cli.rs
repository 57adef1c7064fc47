use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orient-boost")).args(args).output().unwrap()
}

#[test]
fn solve_prints_json() {
    let out = run(&["solve", "--eps", "1", "--k", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["t"], 7);
    assert_eq!(v["delta_exact"], "1/20");
}

#[test]
fn infeasible_design_exits_one() {
    let out = run(&["decompose", "--n", "13", "--t", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "infeasible_at_desk_scale");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["experiment", "--n", "7"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn sidecar_replays_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let out = run(&["experiment", "--pattern", "cycle", "--n", "7", "--t", "3", "--exact", "--seed", "3", "--output", first.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&first).unwrap();
    assert!(csv.lines().nth(1).unwrap().contains("exact:5040"));
    let side = first.with_extension("json");
    let out = run(&["experiment", "--config", side.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(csv, std::fs::read_to_string(&second).unwrap());
}
