//! CSV rows and the JSON run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::series::SeriesValue;
use crate::stats::Estimate;

pub const CSV_HEADER: &str = "quantity,param,value,std_error,error_budget,n,seed,converged";

/// One data point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub quantity: String,
    pub param: String,
    pub value: f64,
    pub std_error: f64,
    pub error_budget: f64,
    pub n: u64,
    pub seed: u64,
    pub converged: bool,
}

impl Row {
    /// Exact value with no sampling error.
    pub fn exact(quantity: &str, param: impl Into<String>, value: f64, seed: u64) -> Self {
        Row {
            quantity: quantity.into(),
            param: param.into(),
            value,
            std_error: 0.0,
            error_budget: 0.0,
            n: 1,
            seed,
            converged: true,
        }
    }

    /// Truncated series; the remainder bound is the error budget.
    pub fn series(quantity: &str, param: impl Into<String>, v: &SeriesValue, seed: u64) -> Self {
        Row {
            quantity: quantity.into(),
            param: param.into(),
            value: v.value,
            std_error: 0.0,
            error_budget: v.remainder_bound,
            n: v.terms_used as u64,
            seed,
            converged: v.converged,
        }
    }

    pub fn estimate(quantity: &str, param: impl Into<String>, e: &Estimate) -> Self {
        Row {
            quantity: quantity.into(),
            param: param.into(),
            value: e.value,
            std_error: e.std_error,
            error_budget: e.error_budget,
            n: e.n,
            seed: e.seed,
            converged: true,
        }
    }

    pub fn unconverged(mut self) -> Self {
        self.converged = false;
        self
    }
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header plus one line per row, `'\n'` terminated. Reals use Rust's
/// shortest round-trip formatting, so the decimal point is always `.`.
pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            field(&r.quantity),
            field(&r.param),
            r.value,
            r.std_error,
            r.error_budget,
            r.n,
            r.seed,
            r.converged
        );
    }
    out
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_secs: f64,
    pub workers: usize,
    pub rows: usize,
    pub all_converged: bool,
    /// Command-specific structured result, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
}

pub fn output_paths(prefix: &str) -> (PathBuf, PathBuf) {
    (
        PathBuf::from(format!("{prefix}.csv")),
        PathBuf::from(format!("{prefix}.json")),
    )
}

pub fn write_outputs(prefix: &str, csv: &str, manifest: &Manifest) -> std::io::Result<()> {
    let (csv_path, json_path) = output_paths(prefix);
    if let Some(dir) = Path::new(&csv_path)
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
    {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(csv_path, csv)?;
    let json = serde_json::to_string_pretty(manifest).map_err(std::io::Error::other)?;
    std::fs::write(json_path, json + "\n")
}
