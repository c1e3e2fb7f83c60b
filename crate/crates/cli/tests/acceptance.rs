//! End-to-end acceptance run through the `thodge` binary. Prints one line per
//! criterion and fails if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;

const SEED: &str = "0";

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

struct Run {
    report: Value,
    stdout: Vec<u8>,
    exit: Option<i32>,
    elapsed: Duration,
}

fn thodge(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_thodge"))
        .args(args)
        .output()
        .expect("the thodge binary runs");
    let elapsed = start.elapsed();
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|_| {
        panic!(
            "no JSON report from {args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    });
    Run {
        report,
        stdout: out.stdout,
        exit: out.status.code(),
        elapsed,
    }
}

fn scenario(name: &str) -> String {
    scenarios().join(name).display().to_string()
}

/// Runs one fuzz suite and returns it after checking the report is well formed.
fn suite(name: &str, cases: usize) -> (Run, Value) {
    let cases = cases.to_string();
    let run = thodge(&["fuzz", "--suite", name, "--cases", &cases, "--seed", SEED]);
    let s = run.report["results"]["suites"][0].clone();
    (run, s)
}

fn suite_ok(run: &Run, s: &Value, cases: usize) -> Result<(), String> {
    if s["cases"] != cases {
        return Err(format!("ran {} cases", s["cases"]));
    }
    if run.exit != Some(0) || s["pass"] != true {
        return Err(format!("{} failures, first: {}", s["failures"], s["first_failure"]));
    }
    Ok(())
}

fn stat(s: &Value, key: &str) -> f64 {
    s["stats"][key].as_f64().unwrap_or(f64::NAN)
}

fn bounded(s: &Value, keys: &[&str], bound: f64) -> Result<String, String> {
    let mut parts = Vec::new();
    for k in keys {
        let v = stat(s, k);
        if !(v <= bound) {
            return Err(format!("{k} = {v:e} exceeds {bound:e}"));
        }
        parts.push(format!("{k} {v:.1e}"));
    }
    Ok(parts.join(", "))
}

fn tensor_spectrum() -> Result<String, String> {
    let (run, s) = suite("tensor-spectrum", 200);
    suite_ok(&run, &s, 200)?;
    if run.elapsed >= Duration::from_secs(60) {
        return Err(format!("took {:?}", run.elapsed));
    }
    let detail = bounded(&s, &["max_spectrum_gap"], 1e-7)?;
    Ok(format!("200 pairs, {detail}, {:.2}s", run.elapsed.as_secs_f64()))
}

fn identities() -> Result<String, String> {
    let (run, s) = suite("identities", 200);
    suite_ok(&run, &s, 200)?;
    let detail = bounded(
        &s,
        &[
            "solution_is_adjoint_times_inverse",
            "kernel_complement_projection",
            "inverse_commutes_with_d",
            "inverse_from_solution_operators",
            "projector_defect",
        ],
        1e-8,
    )?;
    Ok(format!("200 complexes, {detail}"))
}

fn kuenneth() -> Result<String, String> {
    let (run, s) = suite("kuenneth", 200);
    suite_ok(&run, &s, 200)?;
    Ok("200 pairs, exact integer equality".into())
}

fn minkowski_oracle() -> Result<String, String> {
    let (run, s) = suite("minkowski-oracle", 1000);
    suite_ok(&run, &s, 1000)?;
    let sym = thodge(&["symbolic", &scenario("ap-pair.json"), "--oracle-cutoff", "100"]);
    let expected = &sym.report["results"]["expected_sums"][0];
    if sym.exit != Some(0) || expected["matches"] != true {
        return Err(format!("AP(0,2) ⊕ AP(0,3) gave {}", expected["computed"]));
    }
    Ok("1000 pairs at cutoff 100; AP(0,2) ⊕ AP(0,3) = {0} ∪ AP(2,1)".into())
}

fn compactness() -> Result<String, String> {
    let (run, s) = suite("compactness", 500);
    suite_ok(&run, &s, 500)?;
    Ok(format!(
        "500 cases ({} with both factors nondegenerate, {} non-compact)",
        stat(&s, "nondegenerate_cases"),
        stat(&s, "non_compact_cases")
    ))
}

fn curve_products() -> Result<String, String> {
    let (run, s) = suite("curve-products", 500);
    suite_ok(&run, &s, 500)?;
    let bidisc = thodge(&["dbar", &scenario("bidisc.json")]);
    let cell = bidisc.report["results"]["bidegrees"]
        .as_array()
        .and_then(|cells| cells.iter().find(|c| c["bidegree"] == serde_json::json!([0, 1])))
        .cloned()
        .unwrap_or(Value::Null);
    if bidisc.exit != Some(0) || cell["report"]["verdict"] != "non-compact" {
        return Err(format!("bidisc at (0,1): {}", cell["report"]["verdict"]));
    }
    Ok(format!(
        "500 tuples ({} with an infinite Bergman space); bidisc non-compact at (0,1)",
        stat(&s, "infinite_bergman_cases")
    ))
}

fn joint() -> Result<String, String> {
    let (run, s) = suite("joint", 200);
    suite_ok(&run, &s, 200)?;
    let detail = bounded(&s, &["cartesian_gap", "mapping_gap", "sum_operator_gap"], 1e-7)?;
    Ok(format!("200 normal and 200 positive pairs, {detail}"))
}

fn determinism() -> Result<String, String> {
    let runs: &[(&str, &str, &[&str])] = &[
        ("validate", "chain.json", &[]),
        ("spectrum", "chain.json", &[]),
        ("hodge", "chain.json", &[]),
        ("identities", "chain.json", &[]),
        ("tensor", "chain-tensor-chain.json", &[]),
        ("spectrum", "chain-tensor-chain.json", &[]),
        ("validate", "random-complex.json", &[]),
        ("identities", "random-complex.json", &[]),
        ("hodge", "random-complex.json", &[]),
        ("symbolic", "ap-pair.json", &["--oracle-cutoff", "100"]),
        ("dbar", "bidisc.json", &[]),
        ("dbar-n", "riemann-surfaces-3.json", &[]),
        ("dbar", "gaussian-line-pair.json", &[]),
        ("joint", "commuting-pair.json", &[]),
    ];
    let mut shipped: Vec<String> = std::fs::read_dir(scenarios())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    shipped.sort();
    for name in &shipped {
        if !runs.iter().any(|r| r.1 == name) {
            return Err(format!("{name} is not exercised"));
        }
    }
    for (command, file, extra) in runs {
        let path = scenario(file);
        let mut args = vec![*command, path.as_str()];
        args.extend_from_slice(extra);
        let first = thodge(&args);
        let second = thodge(&args);
        if first.exit != Some(0) {
            return Err(format!("{command} {file} exited with {:?}", first.exit));
        }
        if first.stdout != second.stdout {
            return Err(format!("{command} {file} differs between runs"));
        }
    }
    Ok(format!("{} runs over {} scenarios, byte-identical", runs.len(), shipped.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("product Laplacian spectrum", tensor_spectrum),
        ("solution-operator identities", identities),
        ("Künneth dimensions", kuenneth),
        ("Minkowski sum oracle", minkowski_oracle),
        ("essential spectrum and compactness criteria", compactness),
        ("curve product implications", curve_products),
        ("joint spectra", joint),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
