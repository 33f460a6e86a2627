use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};
use zeta_asym_core::mzv::ReductionTable;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-asym"))
        .args(args)
        .env_remove("ZETA_ASYM_PRECISION")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rules_file(edit: impl Fn(&str) -> String) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(edit(ReductionTable::embedded_source()).as_bytes())
        .unwrap();
    f
}

#[test]
fn coeffs_passes() {
    let o = run(&["coeffs"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("status: PASS"));
    assert!(out.contains("83/256*z6 - 1/16*z3^2"));
}

#[test]
fn json_round_trips_with_schema_keys() {
    let o = run(&["--format", "json", "coeffs"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["columns", "command", "config", "passed", "rows", "summary"]
    );
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
    assert_eq!(v["rows"][6]["closed_form"], "83/256*z6 - 1/16*z3^2");
    assert_eq!(v["passed"], true);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn csv_has_fixed_columns() {
    let o = run(&["--format", "csv", "expand", "--order", "3", "--integrate"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let header = out.lines().next().unwrap();
    assert_eq!(
        header,
        "order,integrand,amzv,closed_form,matches_table,status"
    );
}

#[test]
fn missing_rule_is_a_verification_failure() {
    let f = rules_file(|s| {
        s.lines()
            .filter(|l| !l.contains("z(b2,1,1) :="))
            .collect::<Vec<_>>()
            .join("\n")
    });
    let o = run(&["coeffs", "--rules", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("left alternating terms behind"), "{out}");
    assert!(out.contains("status: FAIL"));
}

#[test]
fn wrong_rule_is_a_verification_failure() {
    let f = rules_file(|s| s.replace("z(b4) := -7/8*z4", "z(b4) := -5/8*z4"));
    let o = run(&["coeffs", "--rules", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "--order", "10"]).status.code(), Some(2));
    assert_eq!(run(&["conjecture", "--which", "3"]).status.code(), Some(2));
    assert_eq!(run(&["--precision", "8", "coeffs"]).status.code(), Some(2));
    let f = rules_file(|s| format!("{s}\nz(b4 := nonsense\n"));
    let o = run(&["coeffs", "--rules", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rule table"));
}

#[test]
fn numeric_failures_exit_three() {
    let o = run(&["--precision", "128", "fit"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision"));
}

#[test]
fn unmatched_order_fails() {
    let o = run(&[
        "--order-cap",
        "10",
        "expand",
        "--order",
        "10",
        "--integrate",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("unmatched"));
}

#[test]
fn env_and_config_file_layering() {
    let o = Command::new(env!("CARGO_BIN_EXE_zeta-asym"))
        .args(["--format", "json", "zagier", "-n", "1"])
        .env("ZETA_ASYM_PRECISION", "200")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["precision"], "200");

    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "precision = 192\nformat = json").unwrap();
    let path = cfg.path().to_str().unwrap();
    let o = run(&["--config", path, "zagier", "-n", "1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["precision"], "192");
    let o = run(&["--config", path, "--precision", "160", "zagier", "-n", "1"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["precision"], "160");
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify-lemmas"));
}
