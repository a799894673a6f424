//! Machine-readable result records.
//!
//! Numeric fields serialize in shortest-round-trip decimal form (both the
//! CSV and JSON writers use ryu), so emitted files parse back to the exact
//! same doubles and are byte-stable across platforms. Wall time is kept out
//! of the files on purpose: output bytes must be a function of (config,
//! seed) alone.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::risk::{GapCurveRow, GapReport};

use super::config::OutputFormat;

/// One flat row per grid point of a gap experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub n: usize,
    pub gap_sq: f64,
    pub gap_sq_stderr: f64,
    pub risk_s: f64,
    pub risk_pi: f64,
    pub risk_diff: f64,
    pub risk_diff_stderr: f64,
    pub pythagoras_residual: f64,
    pub pythagoras_stderr: f64,
    pub seed: u64,
    /// Printed in the console summary only; never serialized.
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ResultRecord {
    pub fn from_report(config_hash: &str, row: &GapCurveRow, wall_time_s: f64) -> Self {
        let r: &GapReport = &row.report;
        ResultRecord {
            config_hash: config_hash.to_string(),
            n: row.n,
            gap_sq: r.gap_sq.mean,
            gap_sq_stderr: r.gap_sq.stderr,
            risk_s: r.risk_s.mean,
            risk_pi: r.risk_pi.mean,
            risk_diff: r.risk_diff.mean,
            risk_diff_stderr: r.risk_diff.stderr,
            pythagoras_residual: r.pythagoras_residual,
            pythagoras_stderr: r.pythagoras_stderr,
            seed: r.gap_sq.master_seed,
            wall_time_s,
        }
    }

    /// One-line human summary for the console.
    pub fn summary_line(&self) -> String {
        format!(
            "n={} gap_sq={:.6}±{:.2e} risk_s={:.6} risk_pi={:.6} risk_diff={:.6}±{:.2e} pythagoras={:.2e} wall={:.2}s",
            self.n,
            self.gap_sq,
            self.gap_sq_stderr,
            self.risk_s,
            self.risk_pi,
            self.risk_diff,
            self.risk_diff_stderr,
            self.pythagoras_residual,
            self.wall_time_s
        )
    }
}

/// Serializes records as CSV (header row, RFC-4180 quoting) or JSON lines.
pub fn write_records<W: Write>(
    records: &[ResultRecord],
    format: OutputFormat,
    sink: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for rec in records {
                w.serialize(rec)
                    .map_err(|e| Error::contract(format!("csv write failed: {e}")))?;
            }
            w.flush()
                .map_err(|e| Error::contract(format!("csv flush failed: {e}")))?;
        }
        OutputFormat::Jsonl => {
            let mut sink = sink;
            for rec in records {
                let line = serde_json::to_string(rec)
                    .map_err(|e| Error::contract(format!("json write failed: {e}")))?;
                writeln!(sink, "{line}")
                    .map_err(|e| Error::contract(format!("write failed: {e}")))?;
            }
        }
    }
    Ok(())
}

/// Reads records back from an emitted CSV file.
pub fn read_csv_records(text: &str) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(|e| Error::contract(format!("csv parse failed: {e}"))))
        .collect()
}
