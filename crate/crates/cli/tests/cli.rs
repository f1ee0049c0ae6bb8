use std::process::{Command, Output};

use dcover::regularity::DoubleCoverInstance;
use serde_json::Value;

fn dcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcover")).args(args).output().expect("run dcover")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    k.sort_unstable();
    k
}

#[test]
fn gen_imposes_requested_points() {
    let out = dcover(&["gen", "--seed", "1", "--M", "6", "--m", "3", "--l", "4", "--points", "3", "--branch-points", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(keys(&v), ["M", "f", "g", "l", "m", "p", "points", "toy"]);
    let inst = DoubleCoverInstance::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(inst.points.len(), 3);
    assert!(inst.points.iter().all(|p| inst.f.evaluate(p) == 0));
    assert_eq!(inst.points.iter().filter(|p| inst.g.evaluate(p) == 0).count(), 1);
}

#[test]
fn gen_through_branch_point_uses_origin() {
    let out = dcover(&["gen", "--M", "4", "--m", "3", "--l", "2", "--toy", "--through-branch-point"]);
    let inst = DoubleCoverInstance::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(inst.points, vec![vec![0; 5]]);
    assert_eq!(inst.g.evaluate(&inst.points[0]), 0);
}

#[test]
fn invalid_parameters_exit_one() {
    let out = dcover(&["gen", "--M", "6", "--m", "2", "--l", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert!(out.stdout.is_empty());

    let out = dcover(&["check", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_report_schema_and_inconclusive_exit() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("toy.json");
    let report = dir.path().join("report.json");
    let gen = dcover(&["gen", "--seed", "2", "--M", "4", "--m", "3", "--l", "2", "--toy", "--points", "2", "--out", inst.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    assert!(gen.stdout.is_empty());

    let out = dcover(&["check", inst.to_str().unwrap(), "--lambda-samples", "3", "--out", report.to_str().unwrap()]);
    // Off-branch sets at M = 4 are cones, so irreducibility is never certified.
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(keys(&v), ["header", "instance", "options", "points", "seed", "summary"]);
    assert_eq!(v["header"]["tool"], "dcover");
    assert_eq!(v["summary"]["verdict"], "inconclusive");
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["reasons"]["component_probe"], 2);
    for p in v["points"].as_array().unwrap() {
        assert_eq!(keys(p), ["branch", "entries", "frame", "index", "point", "singular"]);
        assert_eq!(p["branch"], "outside_branch");
    }
}

#[test]
fn sampled_points_replace_file_points() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("toy.json");
    dcover(&["gen", "--seed", "3", "--M", "4", "--m", "3", "--l", "2", "--toy", "--out", inst.to_str().unwrap()]);
    let out = dcover(&["check", inst.to_str().unwrap(), "--points", "2", "--lambda-samples", "2", "--no-header"]);
    let v = json(&out);
    assert!(v.get("header").is_none());
    assert_eq!(v["summary"]["points"], 2);
    assert_eq!(v["summary"]["fail"], 0);
}

#[test]
fn census_matches_golden() {
    let out = dcover(&["census", "--m-min", "6", "--m-max", "7", "--no-header"]);
    assert_eq!(out.status.code(), Some(2));
    let golden = include_str!("golden/census_6_7.json");
    assert_eq!(std::str::from_utf8(&out.stdout).unwrap(), golden);
}

#[test]
fn census_text_lists_every_cell() {
    let out = dcover(&["census", "--m-min", "6", "--m-max", "6", "--text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["e2_lemma41", "lemma41_general", "quartic_count", "alpha_pair_min", "prop41_r21", "telescoping"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
    let bad = dcover(&["census", "--m-min", "5"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn audit_single_cell() {
    let ok = json(&dcover(&["audit", "--a", "2", "--b", "1", "--samples", "0", "--no-header"]));
    assert_eq!(ok["cell"]["status"], "consistent");
    let bad = json(&dcover(&["audit", "--a", "5/2", "--b", "1", "--samples", "0", "--no-header"]));
    assert_eq!(bad["cell"]["status"], "contradictory");
    assert_eq!(bad["ledger"]["threshold"], "4");
    let err = dcover(&["audit", "--a", "1/0", "--b", "1"]);
    assert_eq!(err.status.code(), Some(1));
}
