//! Experiment runners with CSV and JSON outputs.

mod config;
mod runners;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{
    BootstrapConfig, ExperimentConfig, ExperimentKind, ModelConfig, ATYPICAL, LONG_TIME_BOUND_QUBITS,
    MAX_EXPERIMENT_QUBITS, TYPICAL,
};
pub use runners::{
    column_docs, run_joint_lc, run_kurtosis_vs_magic, run_long_time, run_resource_growth,
    run_variance_vs_time,
};

/// Output of one run: a numeric table plus run metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Experiment-level predictions and fits.
    pub summary: serde_json::Value,
    pub wall_clock_seconds: f64,
    pub version: String,
    pub seed: u64,
    /// Named raw sample arrays, written as little-endian `f64` files.
    #[serde(skip)]
    pub raw_samples: Vec<(String, Vec<f64>)>,
}

/// Paths written by [`ExperimentResult::write`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFiles {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub samples: Vec<PathBuf>,
}

impl ExperimentResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Table as CSV; contains no timing data, so reruns are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<experiment>.csv`, `<experiment>.json` and any raw sample files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<OutputFiles> {
        std::fs::create_dir_all(dir)?;
        let stem = self.config.experiment.name();
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&csv, self.to_csv())?;
        std::fs::write(&json, self.to_json()?)?;
        let mut samples = Vec::new();
        for (label, values) in &self.raw_samples {
            let path = dir.join(format!("{stem}_{label}.f64"));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            for v in values {
                f.write_all(&v.to_le_bytes())?;
            }
            f.flush()?;
            samples.push(path);
        }
        Ok(OutputFiles { csv, json, samples })
    }
}

/// Validates `config` and runs the experiment it names.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::VarianceVsTime => run_variance_vs_time(config),
        ExperimentKind::KurtosisVsMagic => run_kurtosis_vs_magic(config),
        ExperimentKind::JointLc => run_joint_lc(config),
        ExperimentKind::ResourceGrowth => run_resource_growth(config),
        ExperimentKind::LongTime => run_long_time(config),
    }
}

/// Reads little-endian `f64` values written by [`ExperimentResult::write`].
pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    let bytes = std::fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Parse(format!("{}: length not a multiple of 8", path.display())));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}
