use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn polyflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyflow")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    assert!(polyflow(&full).status.success());
    path
}

#[test]
fn gen_is_deterministic_and_canonical() {
    let a = polyflow(&["gen", "random-polymatroid", "--n", "6", "--seed", "4"]);
    let b = polyflow(&["gen", "random-polymatroid", "--n", "6", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"ground\": 6"));
}

#[test]
fn solve_and_offline_on_the_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "ut2.json", &["upper-triangular", "--n", "2"]);
    let trace = dir.path().join("trace.csv");
    let report = json(&polyflow(&["solve", "--instance", &inst, "--trace", trace.to_str().unwrap()]));
    assert!((report["primal"].as_f64().unwrap() - 1.5).abs() < 0.01);
    assert_eq!(report["mode"], "frac");
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("step,part,element,delta,primal,dual,min_kappa\n"));
    assert_eq!(csv.lines().count() as u64, report["micro_steps"].as_u64().unwrap() + 1);

    let mi = json(&polyflow(&["solve", "--instance", &inst, "--mode", "mi"]));
    assert!((mi["primal"].as_f64().unwrap() - 1.5).abs() < 0.01);

    let off = json(&polyflow(&["offline", "--instance", &inst, "--problem", "sap"]));
    assert_eq!(off["opt"].as_f64().unwrap(), 2.0);
    assert_eq!(off["backend"], "exhaustive");
    let cut = json(&polyflow(&["offline", "--instance", &inst, "--problem", "sap", "--backend", "cutting-plane"]));
    assert!((cut["opt"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn waterlevels_all_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "ut2.json", &["upper-triangular", "--n", "2"]);
    let loads = dir.path().join("loads.json");
    std::fs::write(&loads, "[0.5, 0.5, 0.5]").unwrap();
    let out =
        json(&polyflow(&["waterlevels", "--instance", &inst, "--loads", loads.to_str().unwrap(), "--method", "all"]));
    let w: Vec<f64> = out["w"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(w, vec![0.5, 1.0, 1.0]);
    assert_eq!(out["checks"]["kkt"], true);
    assert_eq!(out["checks"]["brute_gap"].as_f64().unwrap(), 0.0);
}

#[test]
fn ranking_dumps_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "o.json", &["random-oswm", "--agents", "3", "--items", "5", "--seed", "2"]);
    let runs = dir.path().join("runs.csv");
    let out = json(&polyflow(&[
        "ranking",
        "--instance",
        &inst,
        "--trials",
        "50",
        "--seed",
        "1",
        "--dump-runs",
        runs.to_str().unwrap(),
    ]));
    assert_eq!(out["trials"], 50);
    let mean = out["mean_ratio"].as_f64().unwrap();
    assert!((0.0..=1.0 + 1e-12).contains(&mean));
    let csv = std::fs::read_to_string(&runs).unwrap();
    assert_eq!(csv.lines().count(), 51);
    assert!(csv.starts_with("trial,seed_hash,welfare,opt,ratio\n"));

    let off = json(&polyflow(&["offline", "--instance", &inst, "--problem", "oswm"]));
    assert_eq!(off["x"].as_array().unwrap().len(), 5);
}

#[test]
fn bench_reports_and_checks_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "ut3.json", &["upper-triangular", "--n", "3"]);
    gen(dir.path(), "ut5.json", &["upper-triangular", "--n", "5"]);
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"{"instances":[{"id":"ut5","path":"ut5.json"},{"id":"ut3","path":"ut3.json"}],"thresholds":{"frac":0.62}}"#,
    )
    .unwrap();
    let out = json(&polyflow(&["bench", suite.to_str().unwrap(), "--solvers", "frac"]));
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["instance"], "ut3");
    for row in rows {
        let ratio = row["ratio"].as_f64().unwrap();
        assert!((ratio - row["primal"].as_f64().unwrap() / row["opt"].as_f64().unwrap()).abs() < 1e-9);
    }

    std::fs::write(&suite, r#"{"instances":[{"id":"ut3","path":"ut3.json"}],"thresholds":{"frac":0.99}}"#).unwrap();
    let csv = dir.path().join("report.csv");
    let out = polyflow(&["bench", suite.to_str().unwrap(), "--solvers", "frac", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("instance,solver,"));

    std::fs::write(&suite, "{}").unwrap();
    let out = json(&polyflow(&["bench", suite.to_str().unwrap()]));
    assert!(out["rows"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(polyflow(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(polyflow(&["solve"]).status.code(), Some(1));
    assert_eq!(polyflow(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let oswm = gen(dir.path(), "o.json", &["random-oswm", "--agents", "2", "--items", "3"]);
    assert_eq!(polyflow(&["solve", "--instance", &oswm]).status.code(), Some(1));

    let big = gen(dir.path(), "big.json", &["upper-triangular", "--n", "6"]);
    let out = polyflow(&["offline", "--instance", &big, "--problem", "sap", "--backend", "exhaustive"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"ground":2,"oracle":{"kind":"table","values":{"0":1.0,"1":1.0,"0,1":3.0}},"values":[1,1],"costs":[1,1],"parts":[[0,1]]}"#,
    )
    .unwrap();
    let out = polyflow(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn verify_runs_selected_checks() {
    let out = polyflow(&["verify", "--quick", "--only", "A6,A9"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("A6 PASS")));
    assert!(text.lines().any(|l| l.starts_with("A9 PASS")));
    assert_eq!(polyflow(&["verify", "--only", "A42"]).status.code(), Some(1));
}
