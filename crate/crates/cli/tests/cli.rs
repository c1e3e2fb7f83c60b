use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn thodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thodge")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("thodge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn chain_validates() {
    let out = thodge(&["validate", &scenario("chain.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "validate");
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"]["nondegeneracy"]["nondegenerate"], true);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn chain_squared_matches_pairwise_sums() {
    let out = thodge(&["tensor", &scenario("chain-tensor-chain.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"];
    assert_eq!(r["dims"], serde_json::json!([1, 2, 1]));
    assert!(r["max_spectrum_gap"].as_f64().unwrap() <= 1e-7);
    let middle = r["spectra"].as_array().unwrap().iter().find(|s| s["degree"] == 1).unwrap();
    assert_eq!(middle["expected"], serde_json::json!([2.0, 2.0]));
    for (_, dims) in r["kuenneth"]["degrees"].as_object().unwrap() {
        assert_eq!(dims, &serde_json::json!([0, 0]));
    }
}

#[test]
fn three_discs_fail_in_degree_one_through_the_bergman_space() {
    let out = thodge(&["dbar-n", &scenario("riemann-surfaces-3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"]["report"];
    assert_eq!(r["verdict"], "non-compact");
    assert_eq!(r["rule"], "infinite-bergman-space");
    assert_eq!(r["location"], serde_json::json!([1]));
}

#[test]
fn commuting_pair_joint_spectrum() {
    let out = thodge(&["joint", &scenario("commuting-pair.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["results"];
    // T = [[1,1],[1,1]] and S = [[2,-1],[-1,2]] share eigenvectors (1,1) and (1,-1)
    let pair = r["pair"].as_array().unwrap();
    assert_eq!(pair.len(), 2);
    let lam: Vec<f64> = pair.iter().map(|p| p["lambda"][0].as_f64().unwrap()).collect();
    let mu: Vec<f64> = pair.iter().map(|p| p["mu"][0].as_f64().unwrap()).collect();
    assert!((lam[0] - 0.0).abs() < 1e-9 && (mu[0] - 3.0).abs() < 1e-9);
    assert!((lam[1] - 2.0).abs() < 1e-9 && (mu[1] - 1.0).abs() < 1e-9);
    assert_eq!(r["sum_operator"]["pass"], true);
}

#[test]
fn csv_and_out_files() {
    let json = scratch("spectrum.json");
    let csv = scratch("spectrum.csv");
    let out = thodge(&[
        "spectrum",
        &scenario("chain-tensor-chain.json"),
        "--out",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["results"]["eigenvalues"]["1"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("series,index,value"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn malformed_scenarios_name_the_field() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        "{\n  \"version\": \"1\",\n  \"kind\": \"finite-complex\",\n  \"payload\": {\"complex\": {\"random\": {\"dims\": [1, \"x\"]}}}\n}\n",
    )
    .unwrap();
    let out = thodge(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("payload.complex.random.dims[1]"), "{err}");
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn module_errors_carry_the_module_name() {
    let path = scratch("not-normal.json");
    std::fs::write(
        &path,
        r#"{"version": "1", "kind": "finite-pair", "payload": {"operators": {
            "t": {"rows": 2, "cols": 2, "entries": [[0, 1], [0, 0]]},
            "s": {"rows": 1, "cols": 1, "entries": [[1]]}}}}"#,
    )
    .unwrap();
    let out = thodge(&["joint", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("jointspec:"));
}

#[test]
fn commands_check_the_scenario_kind() {
    let out = thodge(&["dbar", &scenario("chain.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dbar-factors"));
    let out = thodge(&["validate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_expectations_give_exit_one() {
    let path = scratch("wrong.json");
    std::fs::write(
        &path,
        r#"{"version": "1", "kind": "dbar-factors", "payload": {
            "factors": [{"builtin": "infinite-bergman-factor"}, {"builtin": "abstract-compact-factor"}],
            "bidegree": [0, 0],
            "expect": [{"at": [0, 0], "verdict": "compact"}]}}"#,
    )
    .unwrap();
    let out = thodge(&["dbar", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn seeds_change_random_scenarios_and_digests() {
    let a = report(&thodge(&["spectrum", &scenario("random-complex.json")]));
    let b = report(&thodge(&["spectrum", &scenario("random-complex.json"), "--seed", "5"]));
    assert_ne!(a["results"], b["results"]);
    assert_ne!(a["inputs_digest"], b["inputs_digest"]);
}

#[test]
fn fuzz_is_reproducible() {
    let args = ["fuzz", "--cases", "3", "--seed", "11"];
    let first = thodge(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, thodge(&args).stdout);
    let suites = report(&first)["results"]["suites"].as_array().unwrap().len();
    assert_eq!(suites, 7);
    assert_eq!(thodge(&["fuzz", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn catalogue_bundle_is_a_scenario() {
    let out = thodge(&["catalogue"]);
    assert_eq!(out.status.code(), Some(0));
    let bundle = report(&out)["results"]["bundle"].clone();
    let text = serde_json::to_string(&bundle).unwrap();
    let s = thodge::Scenario::parse("bundle", &text).unwrap();
    assert_eq!(s.factors.len(), 3);
    let derived = thodge(&["catalogue", "--derive"]);
    assert_eq!(derived.status.code(), Some(0));
    assert_eq!(report(&derived)["results"]["matches_frozen"], true);
}
