//! The `henopt` binary: exit codes and output files.

mod common;

use std::fs;
use std::process::Command;

fn henopt(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_henopt")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

#[test]
fn missing_case_exits_with_status_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = henopt(&["--case", "no/such/case.json", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/case.json"));
}

#[test]
fn unknown_mode_is_a_usage_error() {
    let case = common::data("reference_case.json");
    let out = henopt(&["--case", case.to_str().unwrap(), "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixture_mode_draws_every_exchanger() {
    let dir = tempfile::tempdir().unwrap();
    let case = common::data("reference_case.json");
    let fixture = common::data("fixture_empirical_1275.json");
    let mode = format!("fixture:{}", fixture.display());
    let out = henopt(&["--case", case.to_str().unwrap(), "--mode", &mode, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = fs::read_to_string(dir.path().join("design_0.dot")).unwrap();
    let nodes = dot.lines().filter(|l| l.trim_start().starts_with("hx") && l.contains("shape=")).count();
    assert_eq!(nodes, 27);
    assert!(dir.path().join("evaluation.json").exists());
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("c_prod"));
}

fn fixed_run(dir: &std::path::Path) -> Vec<Vec<String>> {
    let case = common::data("reference_case.json");
    let out = henopt(&["--case", case.to_str().unwrap(), "--mode", "fixed:1.305", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(dir.join("pareto.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(r.records().map(|x| x.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn fixed_mode_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let rows = fixed_run(dir.path());
    assert_eq!(rows.len(), 2);
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    assert_eq!(rows[1][col("sum_q_hu_kw")].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[1][col("u_v")].parse::<f64>().unwrap(), 1.305);
    for f in ["design_0.dot", "times.csv", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("structural checks: all passed"));

    // same inputs, same table apart from the timing column
    let again = tempfile::tempdir().unwrap();
    let rows2 = fixed_run(again.path());
    let t = col("solve_s");
    let strip = |r: &Vec<Vec<String>>| r.iter().map(|x| [&x[..t], &x[t + 1..]].concat()).collect::<Vec<_>>();
    assert_eq!(strip(&rows), strip(&rows2));
}
