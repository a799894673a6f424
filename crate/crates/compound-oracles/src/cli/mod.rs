//! Config-driven command-line front end.
//!
//! Three commands: `gap` runs the paired risk experiment and writes one
//! record per grid point, `check` evaluates the moment-condition
//! diagnostics into a JSON report, and `validate` cross-checks the engines
//! against each other on random instances.
//!
//! Exit codes: 0 ok, 1 property failure, 2 config error, 3 capacity error.

pub mod config;
pub mod records;
pub mod validate;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::risk::{
    check_b1, check_g1, check_g2, check_two_valued_condition, mc_gap, B1Report, G1Report,
    G2Report, GapCurveRow, TwoValuedConditionReport,
};

pub use config::{ExperimentConfig, OutputFormat};
pub use records::ResultRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;
pub const EXIT_CAPACITY_ERROR: i32 = 3;

/// Maps library errors onto the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Capacity(_) => EXIT_CAPACITY_ERROR,
        _ => EXIT_CONFIG_ERROR,
    }
}

/// Overrides that command-line flags apply on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(format) = overrides.format {
        cfg.format = Some(format);
    }
    if let Some(out) = &overrides.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn output_path(cfg: &ExperimentConfig, config_path: &Path, extension: &str) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| {
        let stem = config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "results".into());
        PathBuf::from(format!("{stem}.{extension}"))
    })
}

/// Runs the gap experiment described by a config file and writes one record
/// per grid entry.
pub fn cmd_gap(config_path: &Path, overrides: &Overrides) -> Result<()> {
    let cfg = load_config(config_path, overrides)?;
    cfg.validate_for_gap()?;
    let engine = cfg.engine.expect("validated");
    let grid = cfg.grid()?;
    let hash = cfg.hash();
    let format = cfg.format.unwrap_or(OutputFormat::Csv);
    let out = output_path(&cfg, config_path, format.extension());

    let mut recs = Vec::with_capacity(grid.len());
    for &n in &grid {
        let started = Instant::now();
        let mus = cfg.mus.generate(n)?;
        let report = mc_gap(&cfg.family, &mus, engine, cfg.reps, cfg.seed)?;
        let row = GapCurveRow { n, report };
        let rec = ResultRecord::from_report(&hash, &row, started.elapsed().as_secs_f64());
        println!("{}", rec.summary_line());
        recs.push(rec);
    }

    let mut buf = Vec::new();
    records::write_records(&recs, format, &mut buf)?;
    std::fs::write(&out, buf)
        .map_err(|e| Error::contract(format!("cannot write {}: {e}", out.display())))?;
    println!("wrote {} record(s) to {}", recs.len(), out.display());
    Ok(())
}

/// The JSON condition report: one block per assumption, null when a block
/// does not apply to the configured multiset.
#[derive(Debug, Serialize)]
pub struct ConditionReport {
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub reps: u64,
    pub g1: G1Report,
    pub g2: G2Report,
    pub b1: Option<B1Report>,
    pub two_valued: Option<TwoValuedConditionReport>,
}

/// Evaluates the moment-condition diagnostics for a single-n config.
pub fn cmd_check(config_path: &Path, overrides: &Overrides) -> Result<()> {
    let cfg = load_config(config_path, overrides)?;
    cfg.validate_for_check()?;
    let n = cfg.grid()?[0];
    let mus = cfg.mus.generate(n)?;
    let reps = cfg.check_reps();
    let gamma = cfg.check_gamma();

    let started = Instant::now();
    let g1 = check_g1(&cfg.family, &mus, gamma, reps, cfg.seed)?;
    let g2 = check_g2(&cfg.family, &mus, reps, cfg.seed)?;
    let b1 = if n >= 2 {
        Some(check_b1(&cfg.family, &mus, reps, cfg.seed)?)
    } else {
        None
    };
    let distinct = mus.distinct();
    let two_valued = if distinct.len() == 2 {
        Some(check_two_valued_condition(
            &cfg.family,
            distinct[0],
            distinct[1],
            reps,
            cfg.seed,
        )?)
    } else {
        None
    };

    let report = ConditionReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        n,
        reps,
        g1,
        g2,
        b1,
        two_valued,
    };
    let out = output_path(&cfg, config_path, "json");
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::contract(format!("report serialization failed: {e}")))?;
    std::fs::write(&out, json + "\n")
        .map_err(|e| Error::contract(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "n={n} reps={reps} sum_sq_weights={:.6}±{:.2e} bound={:.4e} max_ratio_var={:.6} wall={:.2}s",
        report.g2.sum_sq_weights.value,
        report.g2.sum_sq_weights.stderr,
        report.g2.gaussian_bound,
        report
            .b1
            .as_ref()
            .map(|b| b.max_consecutive_ratio_variance.value)
            .unwrap_or(0.0),
        started.elapsed().as_secs_f64()
    );
    println!("wrote condition report to {}", out.display());
    Ok(())
}

/// Cross-engine validation; returns false on property failure (exit 1).
pub fn cmd_validate(
    max_n: usize,
    trials: usize,
    seed: u64,
    inject_fault: bool,
    replay_out: &Path,
) -> Result<bool> {
    let bump = if inject_fault { 1e-6 } else { 0.0 };
    validate::run_all(max_n, trials, seed, bump, replay_out)
}
