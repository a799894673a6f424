//! Config-file schema for experiments.
//!
//! One human-editable TOML file describes an experiment: the observation
//! family, the multiset generator, the grid of problem sizes, the engine,
//! the replication budget and the master seed. The schema rejects unknown
//! fields so typos fail loudly before any computation starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{MAX_ENUMERATION_N, MAX_MINORS_N};
use crate::families::Family;
use crate::risk::{Engine, MuGenerator};

/// Output serialization for `gap` results.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

/// Settings specific to the condition checker.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSettings {
    /// Ratio threshold γ for the separation probe (default 0.1).
    pub gamma: Option<f64>,
    /// Replication budget for the checks (defaults to the experiment reps).
    pub reps: Option<u64>,
}

/// A declarative experiment: everything an invocation needs except the
/// worker count, which must never influence results.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; replication r draws from RNG substream (seed, r).
    pub seed: u64,
    /// Monte Carlo replications per grid point.
    pub reps: u64,
    /// Permutation-invariant engine (required by `gap`, unused by `check`).
    pub engine: Option<Engine>,
    /// Single problem size; exactly one of `n` and `n_grid` must be set.
    pub n: Option<usize>,
    /// Grid of problem sizes.
    pub n_grid: Option<Vec<usize>>,
    /// Result serialization (default csv).
    pub format: Option<OutputFormat>,
    /// Output path (default derived from the config path).
    pub out: Option<PathBuf>,
    pub family: Family,
    pub mus: MuGenerator,
    #[serde(default)]
    pub check: Option<CheckSettings>,
}

impl ExperimentConfig {
    /// Parses and schema-validates a TOML config file.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::contract(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::contract(format!("config schema error in {}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// The resolved n-grid (singleton when `n` was given).
    pub fn grid(&self) -> Result<Vec<usize>> {
        match (&self.n, &self.n_grid) {
            (Some(n), None) => Ok(vec![*n]),
            (None, Some(grid)) if !grid.is_empty() => Ok(grid.clone()),
            (None, Some(_)) => Err(Error::contract("n_grid must be non-empty")),
            (Some(_), Some(_)) => Err(Error::contract("set exactly one of n and n_grid")),
            (None, None) => Err(Error::contract("set one of n and n_grid")),
        }
    }

    /// Structural validation plus the engine-capacity check against the
    /// largest grid entry, performed before any computation.
    pub fn validate_for_gap(&self) -> Result<()> {
        let grid = self.grid()?;
        if self.reps < 2 {
            return Err(Error::contract("reps must be at least 2"));
        }
        let engine = self
            .engine
            .ok_or_else(|| Error::contract("gap experiments need an engine"))?;
        for &n in &grid {
            if n == 0 {
                return Err(Error::contract("grid entries must be ≥ 1"));
            }
            match engine {
                Engine::Enum => {
                    if n > MAX_ENUMERATION_N {
                        return Err(Error::capacity(format!(
                            "enum engine handles n ≤ {MAX_ENUMERATION_N}, grid has {n}"
                        )));
                    }
                }
                Engine::Permanent => {
                    if n < 2 || n > MAX_MINORS_N {
                        return Err(Error::capacity(format!(
                            "permanent engine handles 2 ≤ n ≤ {MAX_MINORS_N}, grid has {n}"
                        )));
                    }
                }
                Engine::TwoValued => match &self.mus {
                    MuGenerator::TwoValued { .. } => {}
                    MuGenerator::Explicit { values } => {
                        let mut distinct = values.clone();
                        distinct.sort_by(f64::total_cmp);
                        distinct.dedup();
                        if distinct.len() > 2 {
                            return Err(Error::contract(
                                "two-valued engine needs at most 2 distinct parameter values",
                            ));
                        }
                    }
                    MuGenerator::IidUniform { .. } => {
                        return Err(Error::contract(
                            "two-valued engine cannot run on an iid-uniform generator",
                        ));
                    }
                },
            }
            // Dry-generate so γ/range errors surface at parse time.
            self.mus.generate(n)?;
        }
        Ok(())
    }

    /// Validation for the condition checker, which needs a single n.
    pub fn validate_for_check(&self) -> Result<()> {
        let grid = self.grid()?;
        if grid.len() != 1 {
            return Err(Error::contract("check needs a single n, not a grid"));
        }
        if self.check_reps() < 32 {
            return Err(Error::contract("check needs reps ≥ 32"));
        }
        let gamma = self.check_gamma();
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::contract("check gamma must be positive"));
        }
        self.mus.generate(grid[0])?;
        Ok(())
    }

    pub fn check_gamma(&self) -> f64 {
        self.check
            .as_ref()
            .and_then(|c| c.gamma)
            .unwrap_or(0.1)
    }

    pub fn check_reps(&self) -> u64 {
        self.check
            .as_ref()
            .and_then(|c| c.reps)
            .unwrap_or(self.reps)
    }

    /// Stable hexadecimal digest of the parsed config, independent of file
    /// formatting and platform. Output plumbing (`out`, `format`) is
    /// excluded: the hash identifies the experiment, not where its records
    /// land.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        canonical.format = None;
        let text = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        let mut out = String::with_capacity(16);
        for byte in &digest[..8] {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}
