use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chamberwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chamberwalk")).args(args).output().expect("run chamberwalk")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_examples() {
    let out = chamberwalk(&["eval", "semichar", "A", "1", "--x", "[1,-1]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out)["result"]["eval"]["value"].as_f64().unwrap();
    assert!((v - 1.8134302).abs() < 1e-7);

    let out = chamberwalk(&["eval", "m1", "A", "1", "--x", "[1,-1]"]);
    let m = &json_stdout(&out)["result"]["eval"]["value"];
    assert!((m[0].as_f64().unwrap() - 0.53731).abs() < 1e-5);
    assert!((m[1].as_f64().unwrap() + 0.53731).abs() < 1e-5);

    let out = chamberwalk(&["eval", "psi", "--family", "A", "--rank", "2", "--lambda", "[0,0,0]", "--x", "[0,0,0]"]);
    let v = &json_stdout(&out)["result"]["eval"]["value"];
    assert_eq!(v["value"][0].as_f64(), Some(1.0));
    assert_eq!(v["regularized"], false);
}

#[test]
fn rho_dump_matches_tables() {
    let out = chamberwalk(&["rho", "C", "3"]);
    let r = &json_stdout(&out)["result"];
    assert_eq!(r["rho"], serde_json::json!([6.0, 4.0, 2.0]));
    assert_eq!(r["weyl_order"], 48);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["eval", "psi", "A", "1", "--lambda", "[1,-1]", "--x", "[1,2]"],
        vec!["eval", "phi", "A", "2", "--lambda", "[1,0,-1]", "--x", "[1,-1]"],
        vec!["eval", "semichar", "A", "1", "--x", "[1,oops]"],
        vec!["rho", "D", "3"],
        vec!["convolve", "group", "--d", "2", "--x", "[-1,1]", "--y", "[1,-1]"],
        vec!["walk", "--x", "[9,-9]", "--n-steps", "10"],
        vec!["check", "support", "--d", "2", "--x", "[1,-1]", "--y", "[1,-1]", "--n", "10"],
        vec!["no-such-command"],
    ] {
        let out = chamberwalk(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failing_selftest_exits_one() {
    let out = chamberwalk(&["selftest", "fast", "--mutate", "rho"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL] criterion  1"));
}

#[test]
fn check_reports_pass() {
    let out = chamberwalk(&["check", "semichar-mult", "--d", "2", "--x", "[1,-1]", "--y", "[1,-1]", "--n", "20000", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json_stdout(&out)["result"];
    assert_eq!(r["pass"], true);
    assert!((r["target"].as_f64().unwrap() - 3.2885).abs() < 1e-4);
}

#[test]
fn outputs_carry_manifest_and_replay_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cloud.csv");
    let out = chamberwalk(&["convolve", "hermitian", "--d", "3", "--x", "[1,0,-1]", "--y", "[0.5,0,-0.5]", "--n", "500", "--seed", "9", "--out", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# manifest: {"));
    assert_eq!(lines.next().unwrap(), "c1,c2,c3,weight");
    assert_eq!(lines.count(), 500);

    let sidecar = dir.path().join("cloud.csv.manifest.json");
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert!(m["wall_time_s"].as_f64().is_some());
    assert_eq!(m["seed"], 9);

    let again = dir.path().join("again.csv");
    let out = chamberwalk(&["replay", path_str(&csv), "--out", path_str(&again)]);
    assert_eq!(out.status.code(), Some(0));
    let replayed = std::fs::read_to_string(&again).unwrap();
    // only the recorded --out differs
    assert_eq!(text.lines().skip(1).collect::<Vec<_>>(), replayed.lines().skip(1).collect::<Vec<_>>());

    let out = chamberwalk(&["replay", path_str(&sidecar)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn walk_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("walk.json");
    std::fs::write(&cfg, r#"{"d": 2, "mu": [{"point": [0.5, -0.5], "weight": 1.0}], "n_steps": 300, "n_replicas": 2, "seed": 4}"#).unwrap();
    let report = dir.path().join("report.json");
    let out = chamberwalk(&["walk", "--config", path_str(&cfg), "--out", path_str(&report)]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["result"]["config"]["n_steps"], 300);
    assert_eq!(r["result"]["report"]["replicas"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(report.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("replica,n,q1_over_n,q2_over_n,scaled_deviation"));
    // checkpoints 1, 2, ..., 256, 300 for each replica
    assert_eq!(csv.lines().count(), 2 + 2 * 10);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_chamberwalk"))
            .env("CHAMBERWALK_THREADS", threads)
            .args(["check", "deformation", "--d", "3", "--x", "[1,0,-1]", "--y", "[0.5,0,-0.5]", "--n", "10000", "--seed", "3"])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("3"));
}
