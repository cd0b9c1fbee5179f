use std::io::Write;
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use walkcount::digraph::{Digraph, IntMatrix};
use walkcount::numlinalg::DEFAULT_TOL;
use walkcount::regex::AutomatonSystem;
use walkcount::spectral::structure_closed_form;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");

fn data(name: &str) -> String {
    format!("{DATA}/{name}")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walkcount")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(contents.as_bytes()).unwrap();
    file
}

#[test]
fn analyze_regex_closed_form() {
    let report = json(&["analyze", "--regex", "a*ba*b(a|b)*"]);
    let terms = report["closed_form"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["eigenvalue"]["re"], "2");
    assert_eq!(terms[0]["coefficients"][0]["re"], "1");
    assert_eq!(terms[1]["eigenvalue"]["re"], "1");
    assert_eq!(terms[1]["coefficients"][0]["re"], "-1");
    assert_eq!(terms[1]["coefficients"][1]["re"], "-1");
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert!(report["checks"][0]["tolerance"].is_number());
}

#[test]
fn analyze_ex2_dominant() {
    let report = json(&["analyze", "--digraph", &data("ex2.dg")]);
    assert_eq!(report["dominant"]["rho"], 2.0);
    assert_eq!(report["dominant"]["index"], 2);
    let row = &report["dominant"]["top"][0]["e_hat"][0];
    let re: Vec<&str> = (0..4).map(|j| row[j]["re"].as_str().unwrap()).collect();
    assert_eq!(re, ["0", "1", "1/2", "1/4"]);
    assert_eq!(report["growth"]["incomparable"], false);
}

#[test]
fn analyze_ex3_growth() {
    let report = json(&["analyze", "--dfa", &data("ex3.json")]);
    let c = report["growth"]["coefficients"].as_array().unwrap();
    assert!((c[0].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((c[1].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(report["growth"]["period"], 2);
}

#[test]
fn analyze_nilpotent_is_not_an_error() {
    let file = temp_file("digraph 2\n1 2\n");
    let report = json(&["analyze", "--digraph", file.path().to_str().unwrap()]);
    assert!(report["dominant"].is_null());
    assert_eq!(report["closed_form"]["transient"][0]["re"], "2");
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["analyze", "--regex", ""]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--regex", "(a"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--digraph", &data("ex2.dg"), "--length", "3", "--from", "9"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--digraph", &data("ex2.dg"), "--length", "3", "--to", "x"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--digraph", "/nonexistent/file.dg"]).status.code(), Some(2));
    let bad = temp_file(r#"{"n": 2, "initial": [1], "final": [2], "arcs": [[1, 99, 1]]}"#);
    assert_eq!(run(&["validate", "--dfa", bad.path().to_str().unwrap()]).status.code(), Some(2));
    let broken = temp_file("{not json");
    assert_eq!(run(&["analyze", "--dfa", broken.path().to_str().unwrap()]).status.code(), Some(2));
    let parse = temp_file("digraph 2\n1 3\n");
    assert_eq!(run(&["analyze", "--digraph", parse.path().to_str().unwrap()]).status.code(), Some(2));
    // comparable dominant components have no class masks
    assert_eq!(run(&["classes", "--digraph", &data("ex2.dg")]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let out = run(&["analyze", "--digraph", &data("ex2.dg"), "--tol", "0.9"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn count_examples() {
    let out = run(&["count", "--regex", "a*ba*b(a|b)*", "--length", "5"]);
    assert_eq!(stdout(&out).trim(), "26");
    let out = run(&["count", "--digraph", &data("ex2.dg"), "--length", "0", "--from", "2", "--to", "2"]);
    assert_eq!(stdout(&out).trim(), "1");
    let report = json(&["count", "--dfa", &data("ex3.json"), "--length", "41"]);
    assert_eq!(report["count"], (1u128 << 42).to_string());
}

#[test]
fn count_matches_closed_form_on_random_digraphs() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..8 {
        let n = rng.gen_range(2..6);
        let a = IntMatrix::from_fn(n, |_, _| if rng.gen_bool(0.4) { 1.into() } else { 0.into() });
        let graph = Digraph::from_adjacency(a).unwrap();
        let file = temp_file(&graph.to_text());
        let all: walkcount::digraph::VertexSet = (0..n).collect();
        let sys = AutomatonSystem::new(graph, all.clone(), all).unwrap();
        let form = structure_closed_form(&sys, DEFAULT_TOL).unwrap();
        for m in [0usize, 3, 9, 15] {
            let out = run(&["count", "--digraph", file.path().to_str().unwrap(), "--length", &m.to_string()]);
            assert_eq!(stdout(&out).trim(), form.evaluate_rounded(m as u64).to_string());
        }
    }
}

#[test]
fn dfa_json_round_trips() {
    let report = json(&["analyze", "--regex", "(ab|b)*a"]);
    let file = temp_file(&report["dfa"].to_string());
    let sys = AutomatonSystem::from_json(&report["dfa"].to_string()).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&sys.to_json()).unwrap(), report["dfa"]);
    for m in ["0", "4", "7"] {
        let from_regex = run(&["count", "--regex", "(ab|b)*a", "--length", m]);
        let from_dfa = run(&["count", "--dfa", file.path().to_str().unwrap(), "--length", m]);
        assert_eq!(stdout(&from_regex), stdout(&from_dfa));
    }
}

#[test]
fn projectors_ex2_exact() {
    let report = json(&["projectors", "--digraph", &data("ex2.dg")]);
    assert_eq!(report["exact"], true);
    let e2 = &report["projectors"][0];
    assert_eq!(e2["eigenvalue"]["re"], "2");
    assert_eq!(e2["multiplicity"], 3);
    assert_eq!(e2["projector"][0][2]["re"], "1/8");
    assert_eq!(e2["projector"][0][3]["re"], "-1/16");
}

#[test]
fn drazin_and_adjugate() {
    let report = json(&["drazin", "--digraph", &data("ex3.dg")]);
    assert_eq!(report["zero_index"], 1);
    assert_eq!(report["drazin"][1][1]["re"], "1/2");
    let report = json(&["adjugate", "--digraph", &data("ex2.dg")]);
    assert_eq!(report["determinant"], "-16");
    assert_eq!(report["adjugate"][0][0], -8);
    assert!(report["checks"][0]["passed"].as_bool().unwrap());
}

#[test]
fn classes_ex3() {
    let report = json(&["classes", "--digraph", &data("ex3.dg")]);
    assert_eq!(report["incomparable"], true);
    let components = report["components"].as_array().unwrap();
    assert_eq!(components[0]["vertices"], serde_json::json!([2]));
    assert_eq!(components[0]["classes"][0]["vertices"], serde_json::json!([1, 2]));
    assert_eq!(components[1]["classes"][0]["vertices"], serde_json::json!([3, 5]));
    assert_eq!(components[1]["classes"][1]["vertices"], serde_json::json!([1, 4]));
    let left: Vec<f64> = serde_json::from_value(components[1]["classes"][0]["left"].clone()).unwrap();
    for (x, y) in left.iter().zip([0.0, 0.0, 1.0, 0.0, 0.5]) {
        assert!((x - y).abs() < 1e-9);
    }
}

#[test]
fn validate_examples() {
    let out = run(&["validate", "--digraph", &data("ex2.dg")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = json(&["validate", "--dfa", &data("ex3.json"), "--depth", "25"]);
    assert_eq!(report["passed"], true);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.iter().any(|n| n.starts_with("growth coefficients converge")));
    assert!(names.contains(&"closed form vs DP counts, m <= 25"));
}
