// SPDX-License-Identifier: MIT OR Apache-2.0
//! Exit codes and output formats of the `ramicon` binary.

use std::path::Path;
use std::process::Command;

struct Outcome {
    stdout: String,
    stderr: String,
    code: i32,
}

fn ramicon(args: &[&str], dir: &Path) -> Outcome {
    ramicon_with_env(args, dir, None)
}

fn ramicon_with_env(args: &[&str], dir: &Path, max_prec: Option<&str>) -> Outcome {
    let mut command = Command::new(env!("CARGO_BIN_EXE_ramicon"));
    command.args(args).current_dir(dir).env_remove("RAMICON_MAX_PREC");
    if let Some(cap) = max_prec {
        command.env("RAMICON_MAX_PREC", cap);
    }
    let out = command.output().expect("binary runs");
    Outcome {
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        code: out.status.code().unwrap_or(-1),
    }
}

fn sample_to(dir: &Path, name: &str, args: &[&str]) {
    let mut full = vec!["sample"];
    full.extend_from_slice(args);
    let out = ramicon(&full, dir);
    assert_eq!(out.code, 0, "sample failed: {}", out.stderr);
    std::fs::write(dir.join(name), out.stdout).unwrap();
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    sample_to(dir.path(), "nu.json", &["--kind", "exponent", "--r", "2", "--m", "2", "--seed", "1"]);
    sample_to(dir.path(), "dir.json", &["--kind", "direction", "--r", "2", "--m", "2", "--seed", "2"]);
    sample_to(dir.path(), "conn.json", &["--kind", "connection", "--nu", "nu.json", "--seed", "3"]);
    dir
}

#[test]
fn validate_accepts_generated_documents() {
    let dir = workspace();
    for (file, kind) in [("nu.json", "exponent"), ("dir.json", "direction"), ("conn.json", "connection")] {
        let out = ramicon(&["validate", file], dir.path());
        assert_eq!(out.code, 0, "{file}: {}", out.stderr);
        assert_eq!(out.stdout.trim(), format!("VALID {kind}"));
    }
}

#[test]
fn validate_rejects_bad_input_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    assert_eq!(ramicon(&["validate", "junk.json"], dir.path()).code, 1);
    assert_eq!(ramicon(&["validate", "missing.json"], dir.path()).code, 1);
}

#[test]
fn usage_errors_exit_with_64() {
    let dir = workspace();
    assert_eq!(ramicon(&["no-such-command"], dir.path()).code, 64);
    let low = ramicon(&["normalize", "--nu", "nu.json", "--conn", "conn.json", "--order", "1"], dir.path());
    assert_eq!(low.code, 64);
    assert_eq!(ramicon(&["--help"], dir.path()).code, 0);
}

#[test]
fn precision_cap_exits_with_two() {
    let dir = workspace();
    let out = ramicon_with_env(&["shear", "--nu", "nu.json", "--prec", "40"], dir.path(), Some("8"));
    assert_eq!(out.code, 2, "{}", out.stderr);
    assert!(out.stderr.contains("PrecisionCap"));
}

#[test]
fn normalize_writes_connection_and_gauge() {
    let dir = workspace();
    let out = ramicon(&["normalize", "--nu", "nu.json", "--conn", "conn.json", "--order", "3", "-o", "out"], dir.path());
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.starts_with("NORMALIZED order=3"));
    assert!(dir.path().join("out/connection.json").is_file());
    assert!(dir.path().join("out/gauge.json").is_file());
    let check = ramicon(&["validate", "out/connection.json"], dir.path());
    assert_eq!(check.code, 0, "{}", check.stderr);
}

#[test]
fn lift_then_curvature_is_flat() {
    let dir = workspace();
    let out = ramicon(&["lift", "--nu", "nu.json", "--dir", "dir.json", "-o", "lift.json"], dir.path());
    assert_eq!(out.code, 0, "{}", out.stderr);
    let flat = ramicon(&["curvature", "lift.json"], dir.path());
    assert_eq!((flat.code, flat.stdout.trim()), (0, "FLAT"));
}

#[test]
fn dims_of_the_sphere_with_one_ramified_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = ramicon(&["dims", "--g", "0", "--r", "2", "--ram", "4"], dir.path());
    assert_eq!((out.code, out.stdout.trim()), (0, "2"));
}

#[test]
fn pairing_verdict_reports_the_antisymmetric_radical() {
    let dir = tempfile::tempdir().unwrap();
    let out = ramicon(&["pair", "--r", "2", "--m", "2", "--check-perfect"], dir.path());
    assert_eq!(out.code, 3);
    assert_eq!(out.stdout.trim(), "NOT PERFECT rank=1 dims=(2,1) antisymmetric_radical=1");
    let report = ramicon(&["pair", "--r", "2", "--m", "2"], dir.path());
    assert_eq!(report.code, 0);
    let doc: serde_json::Value = serde_json::from_str(&report.stdout).unwrap();
    assert_eq!(doc["body"]["perfect_modulo_antisymmetric_tops"], serde_json::Value::Bool(true));
}

#[test]
fn ramstruct_verify_and_selftest_pass() {
    let dir = workspace();
    let out = ramicon(&["ramstruct-verify", "--nu", "nu.json", "--conn", "conn.json"], dir.path());
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.trim_end().ends_with("VERIFIED"));
    let selftest = ramicon(&["selftest", "--seed", "9", "--rounds", "1"], dir.path());
    assert_eq!(selftest.code, 0, "{}{}", selftest.stdout, selftest.stderr);
    assert!(selftest.stdout.contains("SELFTEST PASSED"));
}
