use std::time::Instant;

use rand::Rng as _;
use serde_json::json;

use super::config::{ExperimentConfig, ExperimentKind, LONG_TIME_BOUND_QUBITS};
use super::ExperimentResult;
use crate::error::Result;
use crate::hamiltonian::Propagator;
use crate::moments::{decompose_by_site, kurtosis_law, variance_bound, LongTimeOperators};
use crate::resources::{magic, magic_ladder_states};
use crate::rng;
use crate::stats::{bootstrap_ci_seeded, ls_slope, quantile_sorted, summarize, Ensemble, EnsembleSampler, Statistic};
use crate::statevector::StateVector;
use crate::trotter::{leading_error_pf1_with, s_e, ProductFormula, TrotterErrorEvaluator};
use crate::BootstrapCI;

const QUANTILES: [f64; 8] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 0.999];

/// CSV column reference for each experiment.
pub fn column_docs(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::VarianceVsTime => {
            "CSV columns (one row per time):\n  \
             t                      evolution time of the initial state\n  \
             entropy_1..entropy_K   entropy in bits of the first k qubits, k = 1..N/2\n  \
             mean_s_hat, var_s_hat  LU sample mean and variance of e²/δt⁴\n  \
             var_s_hat_lo/_hi       bootstrap interval of var_s_hat\n  \
             mean_s_e, var_s_e      same for ‖Eψ‖² (E per the convention flag)\n  \
             var_s_e_lo/_hi         bootstrap interval of var_s_e\n  \
             exact_variance         exact LU variance of ‖Eψ‖²\n  \
             trace_bound            variance bound from reduced-state trace distances\n  \
             entropy_bound          variance bound from reduced-state entropies"
        }
        ExperimentKind::KurtosisVsMagic => {
            "CSV columns (one row per T count k):\n  \
             k, magic                      T gates in the ladder state and its linear stabilizer entropy\n  \
             mean_s_hat, var_s_hat         global Clifford sample mean and variance of e²/δt⁴\n  \
             kurtosis_s_hat, _lo, _hi      sample kurtosis of e²/δt⁴ with bootstrap interval\n  \
             kurtosis_s_e, _lo, _hi        same for ‖Eψ‖²\n  \
             predicted_kurtosis            α + β·magic from the exact law"
        }
        ExperimentKind::JointLc => {
            "CSV columns (one row per state; state 0 = LL, 1 = HH, 2 = LH):\n  \
             state, t                      state index and preparation time\n  \
             entropy, magic                half-chain entropy in bits and linear stabilizer entropy\n  \
             mean, mean_lo, mean_hi        local Clifford sample mean of e²/δt⁴ with bootstrap interval\n  \
             variance, variance_lo/_hi     sample variance with bootstrap interval\n  \
             kurtosis, kurtosis_lo/_hi     sample kurtosis with bootstrap interval\n  \
             q0.01 .. q0.999               sample quantiles\n  \
             frobenius                     ‖E‖_F², the ensemble-independent mean of ‖Eψ‖²\n\
             Raw samples are written to joint_lc_<LL|HH|LH>.f64."
        }
        ExperimentKind::ResourceGrowth => {
            "CSV columns (one row per time):\n  \
             t                         evolution time from |0…0⟩\n  \
             entropy, magic            subset entropy in bits and linear stabilizer entropy\n  \
             entropy_atypical, magic_atypical   same with the X field switched off"
        }
        ExperimentKind::LongTime => {
            "CSV columns (one row per initial-state time):\n  \
             t                        time of the initial state from the state model\n  \
             entropy_1..entropy_K     entropy in bits of the first k qubits\n  \
             mean_e, var_e            LU sample mean and variance of ‖(U_p^r − U₀^r)ψ‖\n  \
             var_e_lo/_hi             bootstrap interval of var_e\n  \
             mean_e_r, var_e_r        same for the per-step sum e_r = Σ_k ‖(U_p − U₀)U_p^k ψ‖\n  \
             var_e_r_lo/_hi           bootstrap interval of var_e_r\n  \
             triangle_violations      samples with e > e_r\n  \
             bound                    entropy bound on var_e_r (NaN above 6 qubits)"
        }
    }
}

fn point_seed(seed: u64, label: &str, index: usize) -> u64 {
    rng::stream(seed, rng::tag(label), index as u64).random()
}

fn ci(cfg: &ExperimentConfig, values: &[f64], stat: Statistic, label: &str, index: usize) -> Result<BootstrapCI> {
    bootstrap_ci_seeded(
        values,
        stat,
        cfg.bootstrap.resamples,
        cfg.bootstrap.level,
        point_seed(cfg.seed, label, index),
    )
}

fn prefix_entropies(psi: &StateVector) -> Result<Vec<f64>> {
    (1..=psi.n_qubits() / 2)
        .map(|k| psi.entanglement_entropy(&(0..k).collect::<Vec<_>>()))
        .collect()
}

fn entropy_columns(n: usize) -> Vec<String> {
    (1..=n / 2).map(|k| format!("entropy_{k}")).collect()
}

fn finish(
    cfg: &ExperimentConfig,
    start: Instant,
    columns: Vec<&str>,
    extra: Vec<String>,
    rows: Vec<Vec<f64>>,
    summary: serde_json::Value,
) -> ExperimentResult {
    let mut cols: Vec<String> = Vec::new();
    let mut iter = columns.into_iter();
    if let Some(first) = iter.next() {
        cols.push(first.to_string());
    }
    cols.extend(extra);
    cols.extend(iter.map(str::to_string));
    ExperimentResult {
        config: cfg.clone(),
        columns: cols,
        rows,
        summary,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        version: crate::VERSION.to_string(),
        seed: cfg.seed,
        raw_samples: Vec::new(),
    }
}

fn formula(cfg: &ExperimentConfig, n_groups: usize) -> Result<ProductFormula> {
    match cfg.pf_order() {
        1 => Ok(ProductFormula::pf1(n_groups)),
        2 => Ok(ProductFormula::pf2(n_groups)),
        p => ProductFormula::suzuki(p, n_groups),
    }
}

pub fn run_variance_vs_time(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.n_qubits;
    let spec = cfg.model.build(n)?;
    let states = Propagator::new(&cfg.state_model().build(n)?)?;
    let e = leading_error_pf1_with(&spec, cfg.convention)?;
    let parts = decompose_by_site(&e);
    let eval = TrotterErrorEvaluator::new(&spec, &formula(cfg, spec.partition().len())?, cfg.dt())?;
    let psi0 = StateVector::zero_state(n);

    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for (i, &t) in cfg.times().iter().enumerate() {
        let psi = states.evolve(&psi0, t)?;
        let sampler = EnsembleSampler::new(psi.clone(), Ensemble::Lu, point_seed(cfg.seed, "lu", i));
        let pairs = sampler.map(cfg.samples, |phi| Ok((eval.s_hat(phi)?, s_e(phi, &e)?)))?;
        let (s_hat, s_exact): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let sh = summarize(&s_hat)?;
        let se = summarize(&s_exact)?;
        let ci_hat = ci(cfg, &s_hat, Statistic::Variance, "ci_s_hat", i)?;
        let ci_e = ci(cfg, &s_exact, Statistic::Variance, "ci_s_e", i)?;
        let report = variance_bound(&psi, &parts)?;
        let mut row = vec![t];
        row.extend(prefix_entropies(&psi)?);
        row.extend([
            sh.mean,
            sh.variance,
            ci_hat.lower,
            ci_hat.upper,
            se.mean,
            se.variance,
            ci_e.lower,
            ci_e.upper,
            report.exact_variance,
            report.trace_distance_total,
            report.entropy_total,
        ]);
        rows.push(row);
        if cfg.save_samples {
            raw.push((format!("point{i}_s_hat"), s_hat));
            raw.push((format!("point{i}_s_e"), s_exact));
        }
    }
    let columns = vec![
        "t",
        "mean_s_hat",
        "var_s_hat",
        "var_s_hat_lo",
        "var_s_hat_hi",
        "mean_s_e",
        "var_s_e",
        "var_s_e_lo",
        "var_s_e_hi",
        "exact_variance",
        "trace_bound",
        "entropy_bound",
    ];
    let summary = json!({ "frobenius_norm_sq": e.frobenius_norm_sq(), "n_error_terms": e.len() });
    let mut result = finish(cfg, start, columns, entropy_columns(n), rows, summary);
    result.raw_samples = raw;
    Ok(result)
}

pub fn run_kurtosis_vs_magic(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.n_qubits;
    let spec = cfg.model.build(n)?;
    let e = leading_error_pf1_with(&spec, cfg.convention)?;
    let law = kurtosis_law(&e)?;
    let eval = TrotterErrorEvaluator::new(&spec, &formula(cfg, spec.partition().len())?, cfg.dt())?;

    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for (i, &k) in cfg.k_list().iter().enumerate() {
        let mut r = rng::stream(cfg.seed, rng::tag("ladder"), i as u64);
        let (psi, m) = magic_ladder_states(n, &[k], &mut r)?.remove(0);
        let sampler = EnsembleSampler::new(psi, Ensemble::Gc, point_seed(cfg.seed, "gc", i));
        let pairs = sampler.map(cfg.samples, |phi| Ok((eval.s_hat(phi)?, s_e(phi, &e)?)))?;
        let (s_hat, s_exact): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let sh = summarize(&s_hat)?;
        let k_hat = ci(cfg, &s_hat, Statistic::Kurtosis, "ci_kurt_s_hat", i)?;
        let k_e = ci(cfg, &s_exact, Statistic::Kurtosis, "ci_kurt_s_e", i)?;
        rows.push(vec![
            k as f64,
            m,
            sh.mean,
            sh.variance,
            k_hat.point,
            k_hat.lower,
            k_hat.upper,
            k_e.point,
            k_e.lower,
            k_e.upper,
            law.kurtosis(m),
        ]);
        if cfg.save_samples {
            raw.push((format!("k{k}_s_hat"), s_hat));
            raw.push((format!("k{k}_s_e"), s_exact));
        }
    }
    let columns = vec![
        "k",
        "magic",
        "mean_s_hat",
        "var_s_hat",
        "kurtosis_s_hat",
        "kurtosis_s_hat_lo",
        "kurtosis_s_hat_hi",
        "kurtosis_s_e",
        "kurtosis_s_e_lo",
        "kurtosis_s_e_hi",
        "predicted_kurtosis",
    ];
    let mags: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let fit = |col: usize| {
        let ys: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        ls_slope(&mags, &ys).ok()
    };
    let (slope_hat, slope_e) = (fit(4), fit(7));
    let summary = json!({
        "alpha": law.alpha,
        "beta": law.beta,
        "lemma_gap": law.lemma_gap_centered(),
        "slope_s_hat": slope_hat,
        "slope_s_e": slope_e,
        "slope_sign_matches_beta": slope_hat.map(|s| s.signum() == law.beta.signum()),
    });
    let mut result = finish(cfg, start, columns, Vec::new(), rows, summary);
    result.raw_samples = raw;
    Ok(result)
}

pub fn run_joint_lc(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.n_qubits;
    let spec = cfg.model.build(n)?;
    let e = leading_error_pf1_with(&spec, cfg.convention)?;
    let eval = TrotterErrorEvaluator::new(&spec, &formula(cfg, spec.partition().len())?, cfg.dt())?;
    let typical = Propagator::new(&cfg.state_model().build(n)?)?;
    let atypical = Propagator::new(&cfg.state_model().without_x_field().build(n)?)?;
    let times = cfg.times();
    let psi0 = StateVector::zero_state(n);
    let half: Vec<usize> = (0..n / 2).collect();
    let labels = ["LL", "HH", "LH"];

    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        let prop = if i == 2 { &atypical } else { &typical };
        let psi = prop.evolve(&psi0, times[i])?;
        let sampler = EnsembleSampler::new(psi.clone(), Ensemble::Lc, point_seed(cfg.seed, "lc", i));
        let values = sampler.map(cfg.samples, |phi| eval.s_hat(phi))?;
        let mean = ci(cfg, &values, Statistic::Mean, "ci_mean", i)?;
        let var = ci(cfg, &values, Statistic::Variance, "ci_var", i)?;
        let kurt = ci(cfg, &values, Statistic::Kurtosis, "ci_kurt", i)?;
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mut row = vec![
            i as f64,
            times[i],
            psi.entanglement_entropy(&half)?,
            magic(&psi)?,
            mean.point,
            mean.lower,
            mean.upper,
            var.point,
            var.lower,
            var.upper,
            kurt.point,
            kurt.lower,
            kurt.upper,
        ];
        row.extend(QUANTILES.iter().map(|&q| quantile_sorted(&sorted, q)));
        row.push(e.frobenius_norm_sq());
        rows.push(row);
        raw.push((label.to_string(), values));
    }
    let mut columns = vec![
        "state",
        "t",
        "entropy",
        "magic",
        "mean",
        "mean_lo",
        "mean_hi",
        "variance",
        "variance_lo",
        "variance_hi",
        "kurtosis",
        "kurtosis_lo",
        "kurtosis_hi",
    ];
    let qnames: Vec<String> = QUANTILES.iter().map(|q| format!("q{q}")).collect();
    columns.extend(qnames.iter().map(String::as_str));
    columns.push("frobenius");
    let summary = json!({ "states": labels });
    let mut result = finish(cfg, start, columns, Vec::new(), rows, summary);
    result.raw_samples = raw;
    Ok(result)
}

pub fn run_resource_growth(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.n_qubits;
    let subset: Vec<usize> = (0..cfg.subset_size()).collect();
    let typical = Propagator::new(&cfg.state_model().build(n)?)?;
    let atypical = Propagator::new(&cfg.state_model().without_x_field().build(n)?)?;
    let psi0 = StateVector::zero_state(n);
    let mut rows = Vec::new();
    for &t in &cfg.times() {
        let a = typical.evolve(&psi0, t)?;
        let b = atypical.evolve(&psi0, t)?;
        rows.push(vec![
            t,
            a.entanglement_entropy(&subset)?,
            magic(&a)?,
            b.entanglement_entropy(&subset)?,
            magic(&b)?,
        ]);
    }
    let columns = vec!["t", "entropy", "magic", "entropy_atypical", "magic_atypical"];
    let summary = json!({ "subset": subset });
    Ok(finish(cfg, start, columns, Vec::new(), rows, summary))
}

pub fn run_long_time(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let n = cfg.n_qubits;
    let r = cfg.r();
    let spec = cfg.model.build(n)?;
    let pf = formula(cfg, spec.partition().len())?;
    let eval = TrotterErrorEvaluator::new(&spec, &pf, cfg.dt())?;
    let states = Propagator::new(&cfg.state_model().build(n)?)?;
    let bound_ops = if n <= LONG_TIME_BOUND_QUBITS {
        Some(LongTimeOperators::new(&spec, &pf, cfg.dt(), r)?)
    } else {
        None
    };
    let psi0 = StateVector::zero_state(n);

    let mut rows = Vec::new();
    let mut raw = Vec::new();
    for (i, &t) in cfg.times().iter().enumerate() {
        let psi = states.evolve(&psi0, t)?;
        let sampler = EnsembleSampler::new(psi.clone(), Ensemble::Lu, point_seed(cfg.seed, "lu", i));
        let pairs = sampler.map(cfg.samples, |phi| {
            let lt = eval.long_time(phi, r)?;
            Ok((lt.error, lt.triangle_sum()))
        })?;
        let (errs, sums): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let violations = errs.iter().zip(&sums).filter(|(e, s)| **e > **s + 1e-12).count();
        let se = summarize(&errs)?;
        let ss = summarize(&sums)?;
        let ci_e = ci(cfg, &errs, Statistic::Variance, "ci_e", i)?;
        let ci_s = ci(cfg, &sums, Statistic::Variance, "ci_e_r", i)?;
        let bound = match &bound_ops {
            Some(ops) => ops.bound(&psi)?.total,
            None => f64::NAN,
        };
        let mut row = vec![t];
        row.extend(prefix_entropies(&psi)?);
        row.extend([
            se.mean,
            se.variance,
            ci_e.lower,
            ci_e.upper,
            ss.mean,
            ss.variance,
            ci_s.lower,
            ci_s.upper,
            violations as f64,
            bound,
        ]);
        rows.push(row);
        if cfg.save_samples {
            raw.push((format!("point{i}_e"), errs));
            raw.push((format!("point{i}_e_r"), sums));
        }
    }
    let columns = vec![
        "t",
        "mean_e",
        "var_e",
        "var_e_lo",
        "var_e_hi",
        "mean_e_r",
        "var_e_r",
        "var_e_r_lo",
        "var_e_r_hi",
        "triangle_violations",
        "bound",
    ];
    let summary = json!({ "r": r, "pf_order": pf.order(), "bound_evaluated": bound_ops.is_some() });
    let mut result = finish(cfg, start, columns, entropy_columns(n), rows, summary);
    result.raw_samples = raw;
    Ok(result)
}
