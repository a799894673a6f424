//! End-to-end tests of the command-line interface: exit codes, output
//! determinism, round-trip fidelity, and the fault-injection self-test.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use compound_oracles::cli::records::read_csv_records;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_compound-oracles"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_GAP: &str = r#"
seed = 11
reps = 200
engine = "two-valued"
n = 6
format = "csv"

[family]
kind = "gaussian-location"

[mus]
kind = "two-valued"
mu0 = 0.0
mu1 = 1.0
gamma = 0.5
"#;

#[test]
fn gap_runs_clean_and_is_deterministic_across_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL_GAP);
    let cfg = cfg.to_str().unwrap();

    let out1 = run(
        &["--workers", "1", "gap", "--config", cfg, "--out", "a.csv"],
        tmp.path(),
    );
    assert!(out1.status.success(), "{out1:?}");
    let out3 = run(
        &["--workers", "3", "gap", "--config", cfg, "--out", "b.csv"],
        tmp.path(),
    );
    assert!(out3.status.success());
    let a = std::fs::read(tmp.path().join("a.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "output bytes depend on the worker count");

    // Rerunning with the same seed reproduces the bytes as well.
    let out_again = run(
        &["gap", "--config", cfg, "--out", "c.csv"],
        tmp.path(),
    );
    assert!(out_again.status.success());
    let c = std::fs::read(tmp.path().join("c.csv")).unwrap();
    assert_eq!(a, c);

    // A different seed changes them.
    let out_seeded = run(
        &["gap", "--config", cfg, "--seed", "12", "--out", "d.csv"],
        tmp.path(),
    );
    assert!(out_seeded.status.success());
    let d = std::fs::read(tmp.path().join("d.csv")).unwrap();
    assert_ne!(a, d);
}

#[test]
fn emitted_csv_parses_back_to_full_precision() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL_GAP);
    let out = run(
        &["gap", "--config", cfg.to_str().unwrap(), "--out", "r.csv"],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("r.csv")).unwrap();
    let records = read_csv_records(&text).unwrap();
    assert_eq!(records.len(), 1);

    // Independent recomputation through the library must agree bit for bit.
    let mus = compound_oracles::oracles::TwoValuedSpec::new(6, 3, 0.0, 1.0)
        .unwrap()
        .to_multiset()
        .unwrap();
    let report = compound_oracles::risk::mc_gap(
        &compound_oracles::families::Family::GaussianLocation,
        &mus,
        compound_oracles::risk::Engine::TwoValued,
        200,
        11,
    )
    .unwrap();
    assert_eq!(records[0].gap_sq, report.gap_sq.mean);
    assert_eq!(records[0].gap_sq_stderr, report.gap_sq.stderr);
    assert_eq!(records[0].risk_s, report.risk_s.mean);
    assert_eq!(records[0].risk_pi, report.risk_pi.mean);
    assert_eq!(records[0].risk_diff, report.risk_diff.mean);
    assert_eq!(records[0].pythagoras_residual, report.pythagoras_residual);
}

#[test]
fn jsonl_format_emits_parseable_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.toml", SMALL_GAP);
    let out = run(
        &[
            "gap",
            "--config",
            cfg.to_str().unwrap(),
            "--format",
            "jsonl",
            "--out",
            "r.jsonl",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("r.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("gap_sq").is_some());
        assert!(v.get("wall_time_s").is_none());
    }
}

#[test]
fn schema_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "seed = 1\nbogus = true\n");
    let out = run(&["gap", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    let missing = run(&["gap", "--config", "no-such-file.toml"], tmp.path());
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn capacity_violations_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_GAP.replace("engine = \"two-valued\"", "engine = \"enum\"")
        .replace("n = 6", "n = 9");
    let cfg = write_config(tmp.path(), "cap.toml", &body);
    let out = run(&["gap", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn check_writes_condition_report() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"
seed = 5
reps = 2000
n = 4

[family]
kind = "gaussian-location"

[mus]
kind = "two-valued"
mu0 = 0.0
mu1 = 1.0
gamma = 0.5

[check]
gamma = 0.1
"#;
    let cfg = write_config(tmp.path(), "check.toml", body);
    let out = run(
        &[
            "check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "report.json",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let text = std::fs::read_to_string(tmp.path().join("report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["g1"]["max_sq_ratio_moment"]["value"].is_f64());
    assert!(v["g2"]["sum_sq_weights"]["value"].is_f64());
    assert!(v["b1"]["max_consecutive_ratio_variance"]["value"].is_f64());
    // Two distinct labels: the two-valued block must be present.
    assert!(v["two_valued"]["var_under_zero"]["value"].is_f64());

    // Determinism across workers for the check report too.
    let out1 = run(
        &[
            "--workers",
            "1",
            "check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "w1.json",
        ],
        tmp.path(),
    );
    let out3 = run(
        &[
            "--workers",
            "3",
            "check",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "w3.json",
        ],
        tmp.path(),
    );
    assert!(out1.status.success() && out3.status.success());
    assert_eq!(
        std::fs::read(tmp.path().join("w1.json")).unwrap(),
        std::fs::read(tmp.path().join("w3.json")).unwrap()
    );
}

#[test]
fn check_rejects_grid_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_GAP.replace("n = 6", "n_grid = [4, 6]");
    let cfg = write_config(tmp.path(), "grid.toml", &body);
    let out = run(&["check", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_passes_by_default() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["validate", "--max-n", "5", "--trials", "12", "--seed", "3"],
        tmp.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    for prop in [
        "engine-agreement",
        "covariance",
        "permanent-vs-naive",
        "esp-bridge",
        "estimate-range",
    ] {
        assert!(stdout.contains(prop), "missing property line for {prop}");
    }
    assert!(stdout.contains("pass"));
}

#[test]
fn validate_detects_injected_fault_and_writes_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "validate",
            "--max-n",
            "5",
            "--trials",
            "12",
            "--seed",
            "3",
            "--inject-fault",
            "--out",
            "replay.json",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let replay = std::fs::read_to_string(tmp.path().join("replay.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&replay).unwrap();
    assert_eq!(v["property"], "engine-agreement");
    assert!(v["ys"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn validate_zero_trials_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["validate", "--trials", "0"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse_and_validate() {
    for name in [
        "gap_two_valued_grid.toml",
        "gap_two_valued_n10.toml",
        "check_gaussian_n50.toml",
    ] {
        let path = repo_config(name);
        let cfg = compound_oracles::cli::ExperimentConfig::from_path(&path)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        if name.starts_with("gap") {
            cfg.validate_for_gap().unwrap();
        } else {
            cfg.validate_for_check().unwrap();
        }
    }
}
