//! End-to-end runs of the `pebblecover` binary.

use std::io::Write;
use std::process::Command;

use pebblecover::cube_strategist::StrategyTrace;
use pebblecover::decider::{self, SearchBudget, Verdict};
use pebblecover::graphs::{parse_graph_spec, DEFAULT_VERTEX_BUDGET};
use pebblecover::numbers::{ConjectureReport, InvariantReport, Outcome, RatioReport};
use pebblecover::pebbling::verify_cover_sequence;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pebblecover")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("elapsed_ms");
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn gamma_report_round_trips_and_witness_reverifies() {
    let (code, out, _) = run(&["gamma", "cube:2", "--format", "json"]);
    assert_eq!(code, 0);
    let r: InvariantReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.integer(), Some(9));
    let g = parse_graph_spec(&r.graph, DEFAULT_VERTEX_BUDGET).unwrap();
    let w = r.witness.unwrap().configuration;
    let v = decider::is_coverable(&g, &w, SearchBudget::default()).unwrap().verdict;
    assert_eq!(v, Verdict::NotCoverable);
}

#[test]
fn coverable_exit_codes() {
    let (code, out, _) = run(&["coverable", "cube:2", "simple:0:8"]);
    assert_eq!(code, 1);
    assert!(out.contains("NotCoverable"));
    let (code, out, _) = run(&["coverable", "cube:2", "simple:0:9", "--verify", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "Coverable");
    assert_eq!(v["verified"], true);
}

#[test]
fn strategy_trace_reverifies() {
    let (code, out, _) = run(&["strategy", "cube:3", "simple:0:27", "--verify", "--format", "json"]);
    assert_eq!(code, 0);
    let t: StrategyTrace = serde_json::from_str(&out).unwrap();
    assert!(t.verified);
    let q = parse_graph_spec("cube:3", DEFAULT_VERTEX_BUDGET).unwrap();
    assert!(verify_cover_sequence(&q, &t.initial, &t.moves).unwrap().is_cover);
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        vec!["gamma", "path:3"],
        vec!["pi", "complete:4"],
        vec!["check", "q1", "product:path:2,path:3"],
        vec!["check", "two-pebbling", "cube:2"],
    ] {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let mut full = args.clone();
            full.extend(["--format", "json", "--threads", threads]);
            let (code, out, _) = run(&full);
            assert_eq!(code, 0, "{full:?}");
            let mut v: Value = serde_json::from_str(&out).unwrap();
            strip_timing(&mut v);
            outputs.push(v);
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}

#[test]
fn conjecture_reports_parse() {
    let (code, out, _) = run(&["check", "q4", "path:2", "path:3", "--format", "json"]);
    assert_eq!(code, 0);
    let r: ConjectureReport = serde_json::from_str(&out).unwrap();
    assert_eq!(r.outcome, Outcome::Holds);
    let values: Vec<_> = r.certificate.values.iter().map(|v| v.value.unwrap()).collect();
    assert_eq!(values, vec![3, 7, 21]);
}

#[test]
fn ratio_is_exact() {
    let (code, out, _) = run(&["ratio", "cube:3", "--format", "json"]);
    assert_eq!(code, 0);
    let r: RatioReport = serde_json::from_str(&out).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"]["numerator"], 27);
    assert_eq!(v["value"]["denominator"], 8);
    assert!((r.cube_formula.unwrap() - 3.375).abs() < 1e-9);
}

#[test]
fn edge_list_graphs() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# triangle\n3 3\n0 1\n1 2\n2 0").unwrap();
    let spec = format!("file:{}", f.path().display());
    let (code, out, _) = run(&["gamma", &spec]);
    assert_eq!(code, 0);
    assert!(out.contains("= 5 [bruteforce]"), "{out}");
    let (code, out, _) = run(&["bound", &spec]);
    assert_eq!(code, 0);
    assert!(out.contains("5 <= gamma <= 9"), "{out}");
}

#[test]
fn sampled_gamma_is_reproducible() {
    let a = run(&["gamma", "cube:2", "--samples", "50", "--seed", "7"]);
    let b = run(&["gamma", "cube:2", "--samples", "50", "--seed", "7"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
    assert!(a.1.contains("50 random configurations of size 9, 0 not coverable"));
}

#[test]
fn verify_cube_passes() {
    let (code, out, _) = run(&["verify-cube", "2", "--samples", "100"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn malformed_input_gives_one_line_and_exit_three() {
    for args in [
        vec!["gamma", "cube:"],
        vec!["coverable", "path:3", "1 2"],
        vec!["coverable", "path:3", "simple:9:1"],
        vec!["gamma", "cube:2", "--threads", "many"],
        vec!["check", "q9", "cube:2"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 3, "{args:?}");
        assert!(out.is_empty());
        if !args.contains(&"--threads") && !args.contains(&"q9") {
            assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        }
    }
}
