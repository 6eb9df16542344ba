//! End-to-end runs of the `ppt-geometry` binary: exit codes, record files
//! and the report subcommand.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ppt-geometry"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn omega(out: &Path, n: u64, seed: u64) -> Value {
    json!({
        "experiment": "omega",
        "shape": "2x2",
        "n_samples": n,
        "seed": seed,
        "shards": 2,
        "output_path": out,
    })
}

fn run(args: &[&std::ffi::OsStr]) -> Output {
    bin().args(args).output().expect("spawn binary")
}

fn run_config(path: &Path) -> Output {
    run(&["run".as_ref(), path.as_os_str()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn passing_run_exits_zero_and_writes_record_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gamma.json");
    let cfg = json!({
        "experiment": "gamma", "shape": "1x2", "field": "real",
        "n_samples": 20000, "seed": 3, "shards": 2, "output_path": out,
    });
    let o = run_config(&write_config(dir.path(), "cfg.json", &cfg));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("PASS"));

    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec["experiment"], "gamma");
    assert_eq!(rec["pass"], true);
    assert_eq!(rec["config_hash"].as_str().unwrap().len(), 64);

    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("timestamp,config_hash,experiment"));
    assert!(lines.count() >= 1);
}

#[test]
fn missing_seed_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = omega(&dir.path().join("o.json"), 10_000, 1);
    cfg.as_object_mut().unwrap().remove("seed");
    let o = run_config(&write_config(dir.path(), "cfg.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
    assert!(!dir.path().join("o.json").exists());
}

#[test]
fn unknown_field_and_bad_shape_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = omega(&dir.path().join("o.json"), 10_000, 1);
    cfg["colour"] = json!("blue");
    let o = run_config(&write_config(dir.path(), "a.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    let mut cfg = omega(&dir.path().join("o.json"), 10_000, 1);
    cfg["shape"] = json!("2by2");
    let o = run_config(&write_config(dir.path(), "b.json", &cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shape"), "{}", stderr(&o));
}

#[test]
fn tolerance_failure_exits_one_but_keeps_the_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let mut cfg = omega(&out, 10_000, 5);
    cfg["tolerances"] = json!({"sigma": 1e-6});
    let o = run_config(&write_config(dir.path(), "cfg.json", &cfg));
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec["pass"], false);
}

#[test]
fn zero_boundary_hits_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = omega(&dir.path().join("o.json"), 10_000, 1);
    cfg["shape"] = json!("4x4");
    let o = run_config(&write_config(dir.path(), "cfg.json", &cfg));
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn overrides_take_precedence_over_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let path = write_config(dir.path(), "cfg.json", &omega(&out, 10_000, 1));
    let o = run(&["run".as_ref(), path.as_os_str(), "--seed".as_ref(), "77".as_ref(), "--samples".as_ref(), "12000".as_ref()]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rec["config"]["seed"], 77);
    assert_eq!(rec["config"]["n_samples"], 12000);
}

#[test]
fn validate_samplers_rejects_other_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "cfg.json", &omega(&dir.path().join("o.json"), 10_000, 1));
    let o = run(&["validate-samplers".as_ref(), path.as_os_str()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("experiment"));
}

#[test]
fn validate_samplers_runs_the_battery() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let cfg = json!({
        "experiment": "sampler-validate", "n_samples": 20000, "seed": 11,
        "shards": 2, "output_path": out,
    });
    let o = run(&["validate-samplers".as_ref(), write_config(dir.path(), "cfg.json", &cfg).as_os_str()]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(rec["checks"].as_array().unwrap().len() > 10);
}

fn report(dir: &Path) -> Output {
    run(&["report".as_ref(), dir.as_os_str()])
}

#[test]
fn report_on_empty_directory_prints_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = report(dir.path());
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.contains("| experiment |"));
    assert!(!md.contains("| omega |"));
    assert!(dir.path().join("summary.md").exists());
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn report_lists_one_row_per_omega_record() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records");
    for seed in 1..=3 {
        let cfg = omega(&records.join(format!("omega{seed}.json")), 10_000, seed);
        let o = run_config(&write_config(dir.path(), &format!("c{seed}.json"), &cfg));
        assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    }
    let o = report(&records);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    let omega_rows: Vec<&str> = md
        .lines()
        .filter(|l| l.starts_with("| omega |") && l.split('|').nth(4).unwrap().trim() == "omega")
        .collect();
    assert_eq!(omega_rows.len(), 3, "{md}");
    for row in omega_rows {
        assert_eq!(row.split('|').nth(6).unwrap().trim(), "2");
    }
}

#[test]
fn report_groups_mixed_experiments_and_lists_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records");
    let gamma = json!({
        "experiment": "gamma", "shape": "1x2", "n_samples": 10000, "seed": 2,
        "shards": 2, "output_path": records.join("gamma.json"),
    });
    for (name, cfg) in [("g.json", gamma), ("o.json", omega(&records.join("omega.json"), 10_000, 2))] {
        let o = run_config(&write_config(dir.path(), name, &cfg));
        assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    }
    std::fs::write(records.join("broken.json"), "{not json").unwrap();
    let o = report(&records);
    assert_eq!(o.status.code(), Some(0));
    let md = stdout(&o);
    assert!(md.contains("## gamma"), "{md}");
    assert!(md.contains("## omega"), "{md}");
    let errors = &md[md.find("## Errors").expect("errors section")..];
    assert!(errors.contains("broken.json"));
}

#[test]
fn report_fails_when_no_record_parses() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.json"), "[]").unwrap();
    std::fs::write(dir.path().join("b.json"), "").unwrap();
    let o = report(dir.path());
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("a.json"));
}

#[test]
fn report_on_missing_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = report(&dir.path().join("nope"));
    assert_ne!(o.status.code(), Some(0));
}
