//! The `ayrel` binary: outputs and exit codes.

use std::process::{Command, Output};

fn ayrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ayrel")).args(args).output().expect("binary runs")
}

#[test]
fn build_writes_surface_json() {
    for r in ["0", "3/2", "a^3", "-1/2"] {
        let out = ayrel(&["build", "--r", r]);
        assert_eq!(out.status.code(), Some(0), "r = {r}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
        assert!(v.is_object(), "r = {r}");
    }
}

#[test]
fn build_is_deterministic() {
    assert_eq!(ayrel(&["build", "--r", "3/2"]).stdout, ayrel(&["build", "--r", "3/2"]).stdout);
}

#[test]
fn bad_input_exits_3() {
    assert_eq!(ayrel(&["build", "--r", "3/"]).status.code(), Some(3));
    assert_eq!(ayrel(&["verify", "--suite", "nonsense"]).status.code(), Some(3));
    assert_eq!(ayrel(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(ayrel(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_suite_passes_with_tsv() {
    let out = ayrel(&["verify", "--suite", "renorm", "--tsv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("id\tstatus\tclaim\n"));
    assert!(text.lines().skip(1).all(|l| l.split('\t').nth(1) == Some("pass")), "{text}");
}

#[test]
fn svg_has_cylinder_panel_off_x0() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.svg");
    let p = path.to_str().unwrap();
    assert_eq!(ayrel(&["svg", "--r", "3/2", "-o", p]).status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("C3 "), "four cylinders expected");
    assert_eq!(ayrel(&["svg", "--r", "1", "-o", p]).status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.contains("C2 ") && !svg.contains("C3 "), "three cylinders expected");
}

#[test]
fn report_carries_chart_and_return_map() {
    let out = ayrel(&["report", "--r", "3/2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["cylinders", "twist_chart", "orbit_closure", "return_map", "saf"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["return_map_verdict"], "periodic");
}

#[test]
fn segment_table_has_one_nonperiodic_row() {
    let out = ayrel(&["report", "--segment"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let odd: Vec<&str> = text.lines().skip(1).filter(|l| l.split('\t').nth(2) != Some("periodic")).collect();
    assert_eq!(odd.len(), 1, "{text}");
    assert!(odd[0].starts_with("0\t"), "{text}");
}
