use std::path::PathBuf;
use std::process::{Command, Output};

fn manifest(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name)
}

fn weil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weil")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn run_manifest(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = manifest(name);
    let mut args = vec![cmd, "-m", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    weil(&args)
}

#[test]
fn contact_manifest_verifies() {
    let o = run_manifest("verify", "contact_r3.json", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("contact: PASS"));
}

#[test]
fn planted_kahler_exits_one() {
    let o = run_manifest("verify", "kahler_nonintegrable.json", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] Nijenhuis = 0"));
}

#[test]
fn malformed_expression_reports_position_without_output() {
    let o = run_manifest("verify", "bad_expression.json", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 3"));
}

#[test]
fn cosymplectic_over_even_algebra_is_input_error() {
    let o = run_manifest("lift", "cosymplectic_even.json", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_manifest_key_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(manifest("symplectic_r4.json")).unwrap().replace("\"algebra\"", "\"algebrra\"");
    let path = dir.path().join("typo.json");
    std::fs::write(&path, text).unwrap();
    let o = weil(&["verify", "-m", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("algebrra"));
}

#[test]
fn lift_emits_lifted_coordinates() {
    let o = run_manifest("lift", "symplectic_r4.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("omega^lambda = dx1_1^dy1_2"), "{out}");
}

#[test]
fn kahler_lift_passes_integrability() {
    let o = run_manifest("lift", "kahler_r2.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[pass] Nijenhuis = 0"));
}

#[test]
fn json_report_is_sorted_and_reproducible() {
    let a = run_manifest("lift", "cosymplectic_r3.json", &["--format", "json", "--seed", "11"]);
    let b = run_manifest("lift", "cosymplectic_r3.json", &["--format", "json", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["input"]["resolved_seed"], 11);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.find("\"command\"").unwrap() < text.find("\"components\"").unwrap());
}

#[test]
fn latex_output_is_a_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lift.tex");
    let o = run_manifest("lift", "contact_r3.json", &["--format", "latex", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let tex = std::fs::read_to_string(out).unwrap();
    assert!(tex.starts_with("\\begin{aligned}"));
    assert!(!tex.contains("documentclass"));
}

#[test]
fn compare_lifts_reports_the_difference() {
    let o = run_manifest("compare-lifts", "compare_dual.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("X^A - X~ = (x_2 - (1/2)*x_1) d/dx_2"), "{out}");
    assert!(out.contains("canonical lift projection: PASS") && out.contains("averaged lift projection: PASS"));
}

#[test]
fn compare_lifts_needs_a_field() {
    let o = run_manifest("compare-lifts", "contact_r3.json", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn algebra_info_for_each_family() {
    for (spec, dim) in [("dual", 2), ("jet(2)", 3), ("truncated(2,2)", 6)] {
        let o = weil(&["algebra", "info", spec]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("dimension {dim}\n")), "{spec}");
    }
}

#[test]
fn demos_named_in_the_examples() {
    for name in ["suspension", "walker-dual", "orientation"] {
        let o = weil(&["demo", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}
