use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newton-strata"))
        .args(args)
        .env("NEWTON_STRATA_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn example() -> String {
    fixtures().join("example_a4.toml").display().to_string()
}

#[test]
fn search_matches_the_a4_fixture() {
    let fixture = fixtures().join("appendix_a4.csv");
    let report = json(&["search", "--type", "A", "--rank", "4", "--fixture", fixture.to_str().unwrap()]);
    assert_eq!(report["command"], "search");
    assert_eq!(report["report"]["count"], 56);
    assert_eq!(report["report"]["fixture"]["matches"], true);

    let dir = tempfile::tempdir().unwrap();
    let written = dir.path().join("a4.csv");
    assert!(run(&["search", "--rank", "4", "--csv", written.to_str().unwrap()]).status.success());
    let round_trip = run(&["search", "--rank", "4", "--fixture", written.to_str().unwrap()]);
    assert_eq!(round_trip.status.code(), Some(0));
}

#[test]
fn search_is_empty_in_small_rank() {
    for rank in ["1", "2", "3"] {
        let report = json(&["search", "--rank", rank]);
        assert_eq!(report["report"]["count"], 0, "rank {rank}");
    }
}

#[test]
fn search_reports_fixture_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let original = std::fs::read_to_string(fixtures().join("appendix_a4.csv")).unwrap();
    let truncated: String = original.lines().take(10).map(|l| format!("{l}\n")).collect();
    let path = dir.path().join("short.csv");
    std::fs::write(&path, truncated).unwrap();
    let out = run(&["search", "--rank", "4", "--fixture", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn analyze_reports_the_generic_point_and_chains() {
    let report = json(&["analyze", "--config", &example()]);
    let body = &report["report"];
    assert_eq!(body["b_x"]["nu"], serde_json::json!([[149, 1], [75, 1], [0, 1], [-75, 1], [-149, 1]]));
    assert_eq!(body["chain_length"], 2);
    assert_eq!(body["maximal_chains"].as_array().unwrap().len(), 2);
    assert_eq!(body["mixed_codimension_certificate"], true);
    assert_eq!(report["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.toml");
    std::fs::copy(example(), &copy).unwrap();
    let a = run(&["--format", "json", "analyze", "--config", &example()]);
    let b = run(&["--format", "json", "analyze", "--config", copy.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let written = dir.path().join("out.json");
    let c = run(&["analyze", "--config", &example(), "--output", written.to_str().unwrap()]);
    assert!(c.status.success());
    assert_eq!(std::fs::read(&written).unwrap(), a.stdout);
}

#[test]
fn analyze_rejects_a_bound_that_is_too_large() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(example())
        .unwrap()
        .replace("superregularity_bound = \"74\"", "superregularity_bound = \"75\"");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("superregular"));
}

#[test]
fn malformed_config_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[group]\ntype = \"A\"\nrank = \"4\"\n").unwrap();
    assert_eq!(run(&["analyze", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn qbg_distance() {
    let report = json(&["qbg-dist", "--rank", "2", "--from", "1 2", "--to", ""]);
    assert_eq!(report["report"]["distance"], 2);
    let out = run(&["qbg-dist", "--rank", "2", "--dot"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 15);
}

#[test]
fn small_sample_stays_below_the_formula() {
    let report = json(&["sample", "--config", &example(), "--samples", "20", "--seed", "11"]);
    let body = &report["report"];
    assert_eq!(body["all_below_formula"], true);
    assert_eq!(body["summary"]["accepted"], 20);
    let again = json(&["sample", "--config", &example(), "--samples", "20", "--seed", "11"]);
    assert_eq!(report, again);
}

#[test]
fn poset_queries() {
    let out = run(&["poset", "chain-length", "--lower", "0,0", "--upper", "1,-1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1");
    let interval = json(&["poset", "interval", "--lower", "0,0", "--upper", "1,-1"]);
    assert_eq!(interval["report"]["items"].as_array().unwrap().len(), 2);
    let chains = json(&["poset", "chains", "--lower=149,74,0,-74,-149", "--upper=149,75,0,-75,-149"]);
    assert_eq!(chains["report"]["items"].as_array().unwrap().len(), 2);
    let bad = run(&["poset", "chain-length", "--lower", "1,-1", "--upper", "0,0"]);
    assert_eq!(bad.status.code(), Some(2));
}
