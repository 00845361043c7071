use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], input: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel"))
        .args(args)
        .arg("--in")
        .arg(input)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn inverse_of_rank_one_data() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "z.json", r#"{"zeta": [[2, 0], [0.5, 0]]}"#);
    let csv = dir.path().join("c.csv");
    let out = run(&["inverse", "--nmax", "10", "--csv", csv.to_str().unwrap()], &input);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let coeffs = doc["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 11);
    for (n, pair) in coeffs.iter().enumerate() {
        let expected = 1.875 * 0.25f64.powi(n as i32);
        assert!((pair[0].as_f64().unwrap() - expected).abs() < 1e-12 * expected);
        assert_eq!(pair[1].as_f64().unwrap(), 0.0);
    }
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["n", "re", "im", "abs"]);
    assert_eq!(reader.records().count(), 11);
}

#[test]
fn roundtrip_passes_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "z.json", r#"{"zeta": [[1, 1], [0, -0.9], [0.3, 0.2]]}"#);
    let report = dir.path().join("report.json");
    let out = run(&["roundtrip", "--out", report.to_str().unwrap()], &input);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["passed"], Value::Bool(true));
    assert!(doc["max_relative_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn blaschke_symbol_is_rejected_as_nongeneric() {
    let dir = TempDir::new().unwrap();
    let coeffs: Vec<f64> = (0..80)
        .map(|n| if n == 0 { -0.5 } else { 0.75 * 0.5f64.powi(n - 1) })
        .collect();
    let input = write(
        &dir,
        "b.json",
        &serde_json::json!({ "coefficients": coeffs }).to_string(),
    );
    let out = run(&["forward"], &input);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["code"], "NonGeneric");
    assert!(err["message"].is_string());
    assert!(err["context"].is_object());
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let unordered = write(&dir, "u.json", r#"{"zeta": [1, 2]}"#);
    let out = run(&["inverse"], &unordered);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());

    let malformed = write(&dir, "m.json", r#"{"zeta": "nope"}"#);
    let out = run(&["inverse"], &malformed);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["code"], "InvalidInput");

    let unstable = write(&dir, "r.json", r#"{"numer": [1], "denom": [1, -1]}"#);
    let out = run(&["rank"], &unstable);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["code"], "DenominatorRootInDisc");
}

#[test]
fn tolerance_failures_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "z.json", r#"{"zeta": [2, 1.9]}"#);
    let out = run(&["kernel", "--nmax", "3"], &input);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["code"], "TruncationTooShort");
}

#[test]
fn output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "z.json",
        r#"{"zeta": [[1.5, 0.2], [0.7, -0.4], [0.2, 0], [0.05, 0.01]]}"#,
    );
    for args in [&["inverse"][..], &["kernel"], &["identities"], &["genfun"]] {
        let first = run(args, &input);
        let second = run(args, &input);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn forward_and_genfun_csv_columns() {
    let dir = TempDir::new().unwrap();
    let symbol = write(
        &dir,
        "c.json",
        r#"{"coefficients": [1.875, 0.46875, 0.1171875, 0.029296875]}"#,
    );
    let csv = dir.path().join("f.csv");
    let out = run(&["forward", "--csv", csv.to_str().unwrap()], &symbol);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["j", "rho", "phi", "sigma", "theta"]);

    let spectral = write(&dir, "z.json", r#"{"zeta": [2, 0.5]}"#);
    let csv = dir.path().join("g.csv");
    let out = run(&["genfun", "--points", "5", "--csv", csv.to_str().unwrap()], &spectral);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], Value::Bool(true));
    let mut reader = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["x", "J_product", "J_resolvent", "residual"]
    );
    assert_eq!(reader.records().count(), 5);
}

#[test]
fn rank_of_rational_document() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "r.json", r#"{"numer": [-0.5, 1], "denom": [1, -0.5]}"#);
    let out = run(&["rank"], &input);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["rank_h"], 2);
    assert_eq!(doc["rank_k"], 1);
    assert_eq!(doc["dimension"], 3);
}
