//! End-to-end runs of the `swlab` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use schrodinger_weights::io::Table;

fn swlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swlab")).args(args).output().unwrap()
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["frobnicate"][..], &["rho", "--bogus"], &["verify", "nonsense"], &["rho", "--format", "xml"], &[]] {
        let out = swlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr).to_lowercase();
        assert!(err.contains("error") || err.contains("usage"), "{args:?}");
    }
}

#[test]
fn missing_or_invalid_config_exits_two() {
    let out = swlab(&["char", "--config", "does-not-exist.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"exponents": {"p": 0.5, "q": 1.0, "alpha": 0.0, "theta": 1.0}}"#).unwrap();
    let out = swlab(&["rho", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = swlab(&["verify", "rho", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-rho.json")).unwrap()).unwrap();
    assert_eq!(report["suite"], "rho");
    assert_eq!(report["seed"], 1);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn rho_csv_is_plot_ready() {
    let cfg = config("hermite1d.json");
    let out = swlab(&["rho", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::from_csv(&stdout(&out)).unwrap();
    assert_eq!(table.columns, ["x", "rho", "one_plus_abs_x_rho"]);
    assert_eq!(table.rows.len(), 128);
    let scaled = table.column("one_plus_abs_x_rho").unwrap();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    assert!(lo > 0.0 && hi / lo < 2.0, "ratio {}", hi / lo);
}

#[test]
fn out_dir_gets_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("constant3d.json");
    let out = swlab(&["char", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = Table::from_csv(&std::fs::read_to_string(dir.path().join("char.csv")).unwrap()).unwrap();
    assert_eq!(table.columns[..3], ["x", "y", "z"]);
    assert!(table.column("product").unwrap().iter().all(|v| v.is_finite() && *v > 0.0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("char.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
}

#[test]
fn sweep_reports_refinement_table() {
    let out = swlab(&["sweep", "--format", "json"]);
    let code = out.status.code().unwrap();
    assert!(code == 0 || code == 1);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["command"], "sweep");
    assert_eq!(json["pass"], code == 0);
    let table = Table::from_json(&json["table"]).unwrap();
    assert_eq!(table.columns, ["n", "fitted"]);
    assert!(!table.rows.is_empty());
}

#[test]
fn same_seed_gives_identical_output() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = swlab(&["verify", "maximal", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
        (out.status.code(), std::fs::read(dir.path().join("verify-maximal.json")).unwrap())
    };
    assert_eq!(run(), run());
}
