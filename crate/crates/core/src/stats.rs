//! Ensemble sampling, moment summaries and basic bootstrap intervals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{apply_circuit, enumerate_1q_cliffords, CliffordTableau};
use crate::error::{Error, Result};
use crate::gates::Gate1;
use crate::rng;
use crate::statevector::{random_haar_1q, StateVector};

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const DEFAULT_LEVEL: f64 = 0.95;

/// Population moment summary of a sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    /// `None` when the variance vanishes or `n < 4`.
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Central moments `μ_2, μ_3, μ_4` about the sample mean.
fn central_moments(values: &[f64], m: f64) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - m;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    (s2 / n, s3 / n, s4 / n)
}

pub fn summarize(values: &[f64]) -> Result<SampleSummary> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let m = mean(values);
    let (mu2, mu3, mu4) = central_moments(values, m);
    let defined = values.len() >= 4 && mu2 > 0.0;
    Ok(SampleSummary {
        n: values.len(),
        mean: m,
        variance: mu2,
        skewness: defined.then(|| mu3 / mu2.powf(1.5)),
        kurtosis: defined.then(|| mu4 / (mu2 * mu2)),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Variance,
    Skewness,
    Kurtosis,
}

impl Statistic {
    /// Value on a sample; `NaN` when undefined.
    pub fn evaluate(self, values: &[f64]) -> f64 {
        let m = mean(values);
        if self == Statistic::Mean {
            return m;
        }
        let (mu2, mu3, mu4) = central_moments(values, m);
        match self {
            Statistic::Mean => m,
            Statistic::Variance => mu2,
            Statistic::Skewness => mu3 / mu2.powf(1.5),
            Statistic::Kurtosis => mu4 / (mu2 * mu2),
        }
    }
}

/// Basic (reverse-percentile) bootstrap interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCI {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub resamples: usize,
}

impl BootstrapCI {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    /// True when the interval excludes its own point estimate.
    pub fn excludes_point(&self) -> bool {
        !self.contains(self.point)
    }

    /// Rough standard error implied by the interval width.
    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn bootstrap_ci<R: Rng + ?Sized>(
    values: &[f64],
    statistic: Statistic,
    resamples: usize,
    level: f64,
    rng: &mut R,
) -> Result<BootstrapCI> {
    bootstrap_ci_seeded(values, statistic, resamples, level, rng.random())
}

/// `[T − q_{1−a/2}, T − q_{a/2}]` over the distribution of `T* − T`.
///
/// Resample `i` draws from its own stream of `seed`, so the result does not
/// depend on the thread count.
pub fn bootstrap_ci_seeded(
    values: &[f64],
    statistic: Statistic,
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapCI> {
    if resamples < 100 {
        return Err(Error::InsufficientData {
            needed: 100,
            got: resamples,
        });
    }
    if values.len() < 10 {
        return Err(Error::InsufficientData {
            needed: 10,
            got: values.len(),
        });
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let point = statistic.evaluate(values);
    if !point.is_finite() {
        return Err(Error::Degenerate(format!("{statistic:?} undefined on the sample")));
    }
    let n = values.len();
    let mut deltas: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, rng::tag("bootstrap"), i as u64);
            let sample: Vec<f64> = (0..n).map(|_| values[r.random_range(0..n)]).collect();
            statistic.evaluate(&sample) - point
        })
        .collect();
    deltas.retain(|d| d.is_finite());
    if deltas.len() < resamples / 2 {
        return Err(Error::Degenerate("most resamples have an undefined statistic".into()));
    }
    deltas.sort_by(|a, b| a.total_cmp(b));
    let a = 1.0 - level;
    let lower = point - quantile_sorted(&deltas, 1.0 - a / 2.0);
    let upper = point - quantile_sorted(&deltas, a / 2.0);
    if lower.partial_cmp(&upper) != Some(std::cmp::Ordering::Less) {
        return Err(Error::Degenerate("bootstrap distribution has zero width".into()));
    }
    Ok(BootstrapCI {
        point,
        lower,
        upper,
        level,
        resamples,
    })
}

/// Random-state ensembles around a fixed starting state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Independent single-qubit Haar unitaries.
    Lu,
    /// One global uniform Clifford.
    Gc,
    /// Independent single-qubit uniform Cliffords.
    Lc,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lu" => Ok(Ensemble::Lu),
            "gc" => Ok(Ensemble::Gc),
            "lc" => Ok(Ensemble::Lc),
            other => Err(Error::InvalidArgument(format!("unknown ensemble {other:?}"))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Lu => "lu",
            Ensemble::Gc => "gc",
            Ensemble::Lc => "lc",
        })
    }
}

/// Draws ensemble members by index from a master seed.
#[derive(Clone, Debug)]
pub struct EnsembleSampler {
    psi0: StateVector,
    kind: Ensemble,
    seed: u64,
    local_cliffords: Vec<Gate1>,
}

impl EnsembleSampler {
    pub fn new(psi0: StateVector, kind: Ensemble, seed: u64) -> Self {
        let local_cliffords = if kind == Ensemble::Lc {
            enumerate_1q_cliffords().into_iter().map(|(_, g)| g).collect()
        } else {
            Vec::new()
        };
        EnsembleSampler {
            psi0,
            kind,
            seed,
            local_cliffords,
        }
    }

    pub fn kind(&self) -> Ensemble {
        self.kind
    }

    /// Member `index`; identical for identical `(seed, kind, index)`.
    pub fn draw(&self, index: u64) -> Result<StateVector> {
        let mut r = rng::stream(self.seed, rng::tag(&self.kind.to_string()), index);
        let n = self.psi0.n_qubits();
        let mut psi = self.psi0.clone();
        match self.kind {
            Ensemble::Lu => {
                for q in 0..n {
                    psi.apply_1q_unchecked(&random_haar_1q(&mut r), q);
                }
            }
            Ensemble::Gc => {
                let c = CliffordTableau::random(n, &mut r);
                apply_circuit(&mut psi, &c.synthesize()?);
            }
            Ensemble::Lc => {
                for q in 0..n {
                    let g = &self.local_cliffords[r.random_range(0..self.local_cliffords.len())];
                    psi.apply_1q_unchecked(g, q);
                }
            }
        }
        Ok(psi)
    }

    /// `f` evaluated on members `0..n_samples`, in index order.
    pub fn map<T, F>(&self, n_samples: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&StateVector) -> Result<T> + Sync,
    {
        (0..n_samples as u64)
            .into_par_iter()
            .map(|i| f(&self.draw(i)?))
            .collect()
    }
}

/// Iterator over `n_samples` ensemble members.
pub fn sample_ensemble(
    psi0: &StateVector,
    kind: Ensemble,
    n_samples: usize,
    seed: u64,
) -> impl Iterator<Item = Result<StateVector>> {
    let sampler = EnsembleSampler::new(psi0.clone(), kind, seed);
    (0..n_samples as u64).map(move |i| sampler.draw(i))
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len().min(y.len()),
        });
    }
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all x values equal".into()));
    }
    Ok(sxy / sxx)
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: x.len().min(y.len()),
        });
    }
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("constant series".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Ranks starting at 1, ties averaged.
pub fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson(&ranks(x), &ranks(y))
}
