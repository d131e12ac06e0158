//! Declarative experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::stats::{DEFAULT_LEVEL, DEFAULT_RESAMPLES};
use crate::trotter::ErrorConvention;

/// Sanity cap; dense kernels enforce their own, tighter limits.
pub const MAX_EXPERIMENT_QUBITS: usize = 24;
/// Largest chain for which the long-time analytic bound is evaluated.
pub const LONG_TIME_BOUND_QUBITS: usize = 6;

pub const TYPICAL: (f64, f64, f64) = (0.8090, 0.9045, 1.0);
pub const ATYPICAL: (f64, f64, f64) = (0.0, 0.9045, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    VarianceVsTime,
    KurtosisVsMagic,
    JointLc,
    ResourceGrowth,
    LongTime,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::VarianceVsTime,
        ExperimentKind::KurtosisVsMagic,
        ExperimentKind::JointLc,
        ExperimentKind::ResourceGrowth,
        ExperimentKind::LongTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::VarianceVsTime => "variance_vs_time",
            ExperimentKind::KurtosisVsMagic => "kurtosis_vs_magic",
            ExperimentKind::JointLc => "joint_lc",
            ExperimentKind::ResourceGrowth => "resource_growth",
            ExperimentKind::LongTime => "long_time",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Qimf { h_x: f64, h_y: f64, j: f64 },
    Heisenberg { h: f64, j: f64 },
}

impl ModelConfig {
    pub fn typical() -> Self {
        ModelConfig::Qimf {
            h_x: TYPICAL.0,
            h_y: TYPICAL.1,
            j: TYPICAL.2,
        }
    }

    pub fn atypical() -> Self {
        ModelConfig::Qimf {
            h_x: ATYPICAL.0,
            h_y: ATYPICAL.1,
            j: ATYPICAL.2,
        }
    }

    pub fn heisenberg_preset() -> Self {
        ModelConfig::Heisenberg { h: 0.2, j: 1.0 }
    }

    pub fn build(&self, n: usize) -> Result<HamiltonianSpec> {
        match *self {
            ModelConfig::Qimf { h_x, h_y, j } => HamiltonianSpec::qimf(n, h_x, h_y, j),
            ModelConfig::Heisenberg { h, j } => HamiltonianSpec::heisenberg(n, h, j),
        }
    }

    fn params(&self) -> Vec<f64> {
        match *self {
            ModelConfig::Qimf { h_x, h_y, j } => vec![h_x, h_y, j],
            ModelConfig::Heisenberg { h, j } => vec![h, j],
        }
    }

    /// Same chain with the transverse X field switched off.
    pub fn without_x_field(&self) -> Self {
        match *self {
            ModelConfig::Qimf { h_y, j, .. } => ModelConfig::Qimf { h_x: 0.0, h_y, j },
            ModelConfig::Heisenberg { j, .. } => ModelConfig::Heisenberg { h: 0.0, j },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    #[serde(default = "default_resamples")]
    pub resamples: usize,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_resamples() -> usize {
    DEFAULT_RESAMPLES
}

fn default_level() -> f64 {
    DEFAULT_LEVEL
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            resamples: DEFAULT_RESAMPLES,
            level: DEFAULT_LEVEL,
        }
    }
}

/// One experiment run. Optional fields fall back to per-experiment defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Hamiltonian whose Trotter error is measured.
    pub model: ModelConfig,
    /// Hamiltonian that prepares the initial states `e^{−iHt}|0…0⟩`.
    #[serde(default)]
    pub state_model: Option<ModelConfig>,
    pub n_qubits: usize,
    #[serde(default)]
    pub pf_order: Option<u32>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub r: Option<usize>,
    /// Ensemble size per point; the knob for downscaled runs.
    pub samples: usize,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub k_list: Option<Vec<usize>>,
    #[serde(default)]
    pub subset_size: Option<usize>,
    #[serde(default)]
    pub convention: ErrorConvention,
    /// Also write raw per-sample values as little-endian `f64` files.
    #[serde(default)]
    pub save_samples: bool,
}

fn grid(end: f64, step: f64) -> Vec<f64> {
    let n = (end / step).round() as usize;
    (0..=n).map(|i| (i as f64 * step * 1e6).round() / 1e6).collect()
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            Some("toml") => Self::from_toml(&text),
            _ => Self::from_toml(&text).or_else(|_| Self::from_json(&text)),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Downscaled preset for each experiment.
    pub fn preset(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment: kind,
            model: ModelConfig::typical(),
            state_model: None,
            n_qubits: 6,
            pf_order: None,
            dt: None,
            times: None,
            r: None,
            samples: 2000,
            bootstrap: BootstrapConfig::default(),
            seed: 2025,
            out_dir: None,
            k_list: None,
            subset_size: None,
            convention: ErrorConvention::Half,
            save_samples: false,
        };
        match kind {
            ExperimentKind::VarianceVsTime | ExperimentKind::ResourceGrowth => base,
            ExperimentKind::KurtosisVsMagic | ExperimentKind::JointLc => ExperimentConfig {
                samples: 100_000,
                ..base
            },
            ExperimentKind::LongTime => ExperimentConfig {
                model: ModelConfig::heisenberg_preset(),
                state_model: Some(ModelConfig::typical()),
                r: Some(20),
                ..base
            },
        }
    }

    pub fn pf_order(&self) -> u32 {
        self.pf_order.unwrap_or(match self.experiment {
            ExperimentKind::LongTime => 2,
            _ => 1,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(match self.experiment {
            ExperimentKind::VarianceVsTime => 0.01,
            _ => 0.1,
        })
    }

    pub fn times(&self) -> Vec<f64> {
        if let Some(t) = &self.times {
            return t.clone();
        }
        match self.experiment {
            ExperimentKind::LongTime => grid(4.0, 0.4),
            ExperimentKind::JointLc => vec![0.0, 3.9, 0.4],
            _ => grid(4.0, 0.2),
        }
    }

    pub fn r(&self) -> usize {
        self.r.unwrap_or(100)
    }

    pub fn k_list(&self) -> Vec<usize> {
        self.k_list
            .clone()
            .unwrap_or_else(|| (0..=4.min(self.n_qubits)).collect())
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size.unwrap_or(self.n_qubits / 2).max(1)
    }

    pub fn state_model(&self) -> ModelConfig {
        self.state_model.unwrap_or(match self.experiment {
            ExperimentKind::LongTime => ModelConfig::typical(),
            _ => self.model,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let n = self.n_qubits;
        if !(2..=MAX_EXPERIMENT_QUBITS).contains(&n) {
            return fail(format!("n_qubits = {n} outside 2..={MAX_EXPERIMENT_QUBITS}"));
        }
        for m in std::iter::once(&self.model).chain(self.state_model.as_ref()) {
            if m.params().iter().any(|p| !p.is_finite()) {
                return fail("model parameters must be finite".into());
            }
        }
        if self.samples < 10 {
            return fail(format!("samples = {} must be at least 10", self.samples));
        }
        if self.bootstrap.resamples < 100 {
            return fail("bootstrap.resamples must be at least 100".into());
        }
        if !(self.bootstrap.level > 0.0 && self.bootstrap.level < 1.0) {
            return fail("bootstrap.level must lie in (0, 1)".into());
        }
        let dt = self.dt();
        if !(dt.is_finite() && dt > 0.0) {
            return fail(format!("dt = {dt} must be positive"));
        }
        let p = self.pf_order();
        if p == 0 || (p > 1 && p % 2 == 1) || p > 8 {
            return fail(format!("pf_order = {p} must be 1 or even and at most 8"));
        }
        let times = self.times();
        if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return fail("times must be a nonempty list of nonnegative numbers".into());
        }
        if self.r() == 0 {
            return fail("r must be positive".into());
        }
        if self.subset_size() > n {
            return fail("subset_size exceeds n_qubits".into());
        }
        if let Some(k) = self.k_list().into_iter().find(|&k| k > n) {
            return fail(format!("k_list entry {k} exceeds n_qubits"));
        }
        let needs_pf1_qimf = matches!(
            self.experiment,
            ExperimentKind::VarianceVsTime | ExperimentKind::KurtosisVsMagic | ExperimentKind::JointLc
        );
        if needs_pf1_qimf {
            if !matches!(self.model, ModelConfig::Qimf { .. }) {
                return fail(format!("{} needs a two-group (qimf) model", self.experiment.name()));
            }
            if p != 1 {
                return fail(format!("{} uses the first-order formula", self.experiment.name()));
            }
        }
        if self.experiment == ExperimentKind::JointLc && times.len() != 3 {
            return fail("joint_lc takes exactly three times (LL, HH, LH)".into());
        }
        if self.experiment == ExperimentKind::KurtosisVsMagic && self.k_list().is_empty() {
            return fail("k_list must not be empty".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for kind in ExperimentKind::ALL {
            ExperimentConfig::preset(kind).validate().unwrap();
        }
    }

    #[test]
    fn toml_round_trip_and_unknown_fields() {
        let cfg = ExperimentConfig::preset(ExperimentKind::LongTime);
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        let bad = format!("{text}\nbogus = 1\n");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config(_))));
        let bad_model = text.replace("name = \"heisenberg\"", "name = \"heisenberg\"\nextra = 2.0");
        assert!(ExperimentConfig::from_toml(&bad_model).is_err());
    }

    #[test]
    fn rejects_invalid_values() {
        let mut cfg = ExperimentConfig::preset(ExperimentKind::VarianceVsTime);
        cfg.samples = 3;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset(ExperimentKind::VarianceVsTime);
        cfg.model = ModelConfig::heisenberg_preset();
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::preset(ExperimentKind::KurtosisVsMagic);
        cfg.k_list = Some(vec![7]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn defaults_follow_experiment() {
        assert_eq!(ExperimentConfig::preset(ExperimentKind::VarianceVsTime).dt(), 0.01);
        assert_eq!(ExperimentConfig::preset(ExperimentKind::KurtosisVsMagic).dt(), 0.1);
        assert_eq!(ExperimentConfig::preset(ExperimentKind::LongTime).pf_order(), 2);
        assert_eq!(grid(1.0, 0.2), vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
    }
}
