//! Runs the thirteen acceptance criteria at full size and prints one line
//! per criterion. Exits nonzero if a gating check fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use chamberwalk::selftest::{run_criterion, CriterionResult, Level, SuiteOptions, CRITERIA};

const SEED: u64 = 20240917;

fn selftest_fast(dir: &Path, threads: &str) -> (i32, Vec<u8>) {
    let _ = std::fs::remove_dir_all(dir);
    let out = Command::new(env!("CARGO_BIN_EXE_chamberwalk"))
        .args(["selftest", "fast", "--seed", "11", "--threads", threads, "--out"])
        .arg(dir)
        .output()
        .expect("run chamberwalk");
    let json = std::fs::read(dir.join("selftest.json")).unwrap_or_default();
    (out.status.code().unwrap_or(-1), json)
}

/// Two `selftest fast` runs with the same seed and different thread counts.
fn determinism_via_binary() -> CriterionResult {
    let tmp = tempfile::tempdir().expect("tempdir");
    let dir = tmp.path().join("out");
    let (code_a, a) = selftest_fast(&dir, "1");
    let (code_b, b) = selftest_fast(&dir, "4");
    let identical = !a.is_empty() && a == b;
    CriterionResult {
        id: 13,
        name: CRITERIA[12].1.to_string(),
        pass: identical && code_a == code_b,
        detail: serde_json::json!({"bytes": a.len(), "identical": identical, "exit_codes": [code_a, code_b]}),
    }
}

/// The support extent inside criterion 8 is reported, not gated; see README.
fn gating_failure(r: &CriterionResult) -> bool {
    if r.pass {
        return false;
    }
    if r.id == 8 {
        let cases_ok = r.detail["cases"].as_array().is_some_and(|c| c.iter().all(|c| c["report"]["pass"] == true));
        return !cases_ok;
    }
    true
}

fn summary(r: &CriterionResult) -> String {
    let d = &r.detail;
    match r.id {
        3 => format!("{}", d["families"]),
        4 => format!("{}", d["ranks"]),
        8 => format!("extent {}", d["extent"]),
        9 => format!("walks {}", d["walks"].as_array().map_or(0, |w| w.len())),
        10 => format!("max error {}", d["max_error"]),
        11 => format!("ks {} critical {}", d["ks"], d["critical"]),
        12 => format!("violations {} min slack {}", d["violations"], d["min_slack"]),
        13 => format!("{d}"),
        _ => String::new(),
    }
}

fn main() {
    let opts = SuiteOptions::new(Level::Full, SEED);
    let mut failures = Vec::new();
    for (id, _) in CRITERIA {
        let t0 = Instant::now();
        let r = if id == 13 {
            determinism_via_binary()
        } else {
            match run_criterion(id, &opts) {
                Ok(r) => r,
                Err(e) => {
                    println!("[FAIL] criterion {id:>2}: error {e}");
                    failures.push(id);
                    continue;
                }
            }
        };
        println!("{}  ({:.1}s) {}", r.line(), t0.elapsed().as_secs_f64(), summary(&r));
        if gating_failure(&r) {
            failures.push(id);
        }
    }
    if failures.is_empty() {
        println!("acceptance: all gating checks passed");
    } else {
        println!("acceptance: gating failures in criteria {failures:?}");
        std::process::exit(1);
    }
}
