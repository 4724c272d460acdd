use std::path::PathBuf;
use std::process::Command;

use drinfeld_cli::{run, CliError, JobConfig};

fn config(name: &str) -> JobConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    JobConfig::load(&path).unwrap()
}

#[test]
fn carlitz_period_has_degree_q_over_q_minus_one() {
    let r = run(&config("carlitz_q2.json"), "period").unwrap();
    assert!(r.pass);
    let w = &r.values["periods"][0];
    assert_eq!(w["valuation"], "-2");
}

#[test]
fn cm_galois_dimensions() {
    let r = run(&config("cm_q2.json"), "galois-dim").unwrap();
    for (k, v) in [("r", 2), ("s", 2), ("centralizer_dim", 2), ("predicted_trdeg", 2)] {
        assert_eq!(r.values[k], v, "{k}");
    }
}

#[test]
fn rank2_trivialization_rows_all_pass() {
    let r = run(&config("rank2_q2.json"), "verify-triv").unwrap();
    assert!(!r.residuals.is_empty());
    assert!(r.residuals.iter().all(|x| x["pass"] == true));
    assert!(r.pass);
}

#[test]
fn unknown_command() {
    assert!(matches!(run(&config("carlitz_q2.json"), "frobnicate"), Err(CliError::UnknownCommand(_))));
}

#[test]
fn text_report_lists_checks() {
    let t = run(&config("carlitz_q2.json"), "period").unwrap().to_text();
    assert!(t.starts_with("period ("));
    assert!(t.contains("pass: true"));
    assert!(t.lines().any(|l| l.starts_with("PASS ")));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_drinfeld");
    let cfg = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/carlitz_q2.json");
    let ok = Command::new(bin).args(["period", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(json["command"], "period");
    let bad = Command::new(bin).args(["frobnicate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
