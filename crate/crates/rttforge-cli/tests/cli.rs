use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_rttforge");
const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn run_stdin(args: &[&str], config: &str) -> Output {
    let mut child = Command::new(BIN).args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(config.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn run_file(command: &str, file: &str, extra: &[&str]) -> Output {
    let path = format!("{CONFIGS}/{file}");
    let mut args = vec![command, "--config", path.as_str()];
    args.extend_from_slice(extra);
    Command::new(BIN).args(&args).output().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn qybe_example() {
    let o = run_stdin(&["verify-qybe"], r#"{"family": "yang", "N": 2, "h_order": 4}"#);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["checks"]["children"][0]["exact_zero"], true);
    assert_eq!(r["config"]["windows"]["h_order"], 4);
}

#[test]
fn pbw_example() {
    let o = run_stdin(&["pbw-count"], r#"{"family": "yang", "N": 2, "L": 1, "max_word_len": 2}"#);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["data"]["classical"], 45);
    assert!(r["data"]["quantum"].as_array().unwrap().iter().all(|q| q == 45));
}

#[test]
fn cybe_sl1_is_trivially_zero() {
    let o = run_stdin(&["verify-cybe"], r#"{"family": "yang", "N": 1}"#);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(report(&o)["checks"]["exact_zero"], true);
}

#[test]
fn failing_check_still_reports() {
    // yang is not elliptic: the axioms fail, exit 1, report on stdout
    let o = run_stdin(&["verify-elliptic"], r#"{"family": "yang", "N": 2}"#);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&o)["passed"], false);
}

#[test]
fn usage_errors() {
    assert_eq!(run_stdin(&["verify-everything"], "{}").status.code(), Some(2));
    assert_eq!(run_stdin(&["verify-cybe"], "{not json").status.code(), Some(2));
    assert_eq!(run_stdin(&["verify-cybe"], r#"{"family": "hyperbolic"}"#).status.code(), Some(2));
    assert_eq!(run_stdin(&["pbw-count", "--bless"], r#"{"family": "yang"}"#).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    for (cmd, file) in [("rep-check", "yang2_two_point.json"), ("normal-form", "yang2.json"), ("verify-elliptic", "elliptic2.json")] {
        let a = run_file(cmd, file, &[]);
        let b = run_file(cmd, file, &[]);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn flags_override_config() {
    let o = run_file("normal-form", "yang2.json", &["--seed", "11", "--tol", "1e-6"]);
    let r = report(&o);
    assert_eq!(r["config"]["seed"], 11);
    assert_eq!(r["config"]["tol"], 1e-6);
}

#[test]
fn goldens_match() {
    for cmd in ["emit-relations", "qdet"] {
        let o = run_file(cmd, "yang2.json", &[]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        let r = report(&o);
        let g = r["checks"]["children"].as_array().unwrap().iter().find(|c| c["check"] == "golden").expect("golden compared");
        assert_eq!(g["exact_zero"], true, "{cmd}");
    }
}

#[test]
fn bless_writes_and_compares() {
    let dir = std::env::temp_dir().join(format!("rttforge-golden-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let cfg = r#"{"family": "yang", "N": 2, "h_order": 2, "u_window": [-4, 4]}"#;
    assert_eq!(run_stdin(&["qdet", "--bless", "--golden-dir", d], cfg).status.code(), Some(0));
    let o = run_stdin(&["qdet", "--golden-dir", d], cfg);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"golden\""));
    // a different window is not compared against this golden
    let o = run_stdin(&["qdet", "--golden-dir", d], r#"{"family": "yang", "N": 2, "h_order": 1}"#);
    assert!(!String::from_utf8_lossy(&o.stdout).contains("\"golden\""));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn every_command_runs_on_sample_configs() {
    let cases = [
        ("verify-unitarity", "rational2.json"),
        ("verify-degeneration", "trig3.json"),
        ("solve-f0", "yang2.json"),
        ("pair-b", "yang2.json"),
        ("separate", "yang2_two_point.json"),
        ("classical-limit", "yang2_two_point.json"),
        ("factored-assoc", "yang2_two_point.json"),
        ("verify-qybe", "elliptic2.json"),
        ("verify-cybe", "trig3.json"),
    ];
    for (cmd, file) in cases {
        let o = run_file(cmd, file, &[]);
        assert_eq!(o.status.code(), Some(0), "{cmd} {file}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
