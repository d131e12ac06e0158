//! Exact ensemble predictions for `s_E`.
//!
//! Covers the entanglement bounds on the local-unitary variance, the exact
//! local-unitary variance, Clifford-orbit moments `m1..m4`, the `A`/`B` traces
//! and the linear kurtosis law `Kur = α + βM`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, Propagator};
use crate::pauli::{i_pow, mask_to_qubits, DenseMatrix, PauliKey, PauliOperator, PauliString};
use crate::statevector::StateVector;
use crate::trotter::{pf_unitary, ProductFormula};

/// Largest support on which reduced states are formed.
pub const DEFAULT_PAIR_LIMIT: usize = 8;
/// Largest term count of `E†E` accepted by the symbolic `A` path.
pub const DEFAULT_TERM_BUDGET: usize = 2000;
/// Qubit limit for 4^N brute-force oracles.
pub const BRUTE_FORCE_LIMIT: usize = 3;
/// Qubit limit for the long-time bound, which works with dense `2^N` operators.
pub const LONG_TIME_LIMIT: usize = 8;

/// `E†E`.
pub fn error_gram(e: &PauliOperator) -> Result<PauliOperator> {
    e.dagger().mul(e)
}

/// Splits `E` into pieces keyed by the lowest qubit each term touches.
pub fn decompose_by_site(e: &PauliOperator) -> Vec<PauliOperator> {
    let n = e.n_qubits();
    let mut parts = vec![PauliOperator::zero(n); n];
    for (key, c) in e.iter() {
        let site = mask_to_qubits(n, key.x | key.z).first().copied().unwrap_or(0);
        parts[site].add_term(*key, *c);
    }
    parts.retain(|p| !p.is_zero());
    parts
}

/// `(E_{j'}†E_j + E_j†E_{j'} − Tr(·)I/d) / (1 + δ_{jj'})`.
pub fn error_pair_operator(ej: &PauliOperator, ejp: &PauliOperator, same: bool) -> Result<PauliOperator> {
    let sum = ejp.dagger().mul(ej)?.add(&ej.dagger().mul(ejp)?)?;
    let traceless = sum.traceless_part();
    Ok(if same { traceless.scale_real(0.5) } else { traceless })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub j: usize,
    pub j_prime: usize,
    pub support: Vec<usize>,
    pub a: f64,
    pub entropy_bits: f64,
    /// `Tr|ρ − I/d_s|`.
    pub trace_distance: f64,
    pub trace_term: f64,
    pub entropy_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceBoundReport {
    pub pairs: Vec<PairRecord>,
    pub trace_distance_total: f64,
    pub entropy_total: f64,
    pub exact_variance: f64,
}

/// Entanglement bounds on the local-unitary variance of `s_E` for `E = Σ_j E_j`.
pub fn variance_bound(psi0: &StateVector, parts: &[PauliOperator]) -> Result<VarianceBoundReport> {
    variance_bound_with_limit(psi0, parts, DEFAULT_PAIR_LIMIT)
}

pub fn variance_bound_with_limit(
    psi0: &StateVector,
    parts: &[PauliOperator],
    limit: usize,
) -> Result<VarianceBoundReport> {
    let n = psi0.n_qubits();
    let e = parts
        .iter()
        .try_fold(PauliOperator::zero(n), |acc, p| acc.add(p))?;
    let gram_env = error_gram(&e)?.abs_envelope();
    let mut pairs = Vec::new();
    for j in 0..parts.len() {
        for jp in j..parts.len() {
            let ejj = error_pair_operator(&parts[j], &parts[jp], j == jp)?;
            if ejj.is_zero() {
                continue;
            }
            let a = 2.0 * ejj.abs_envelope().trace_product(&gram_env)?.re;
            let support: Vec<usize> = ejj.support().into_iter().collect();
            if support.len() > limit {
                return Err(Error::DenseLimit {
                    what: "pair support",
                    n_qubits: support.len(),
                    limit,
                });
            }
            let rho = psi0.reduced_density(&support)?;
            let entropy_bits = rho.entropy_bits();
            let trace_distance = rho.distance_to_maximally_mixed();
            let gap = (2.0 * support.len() as f64 - 2.0 * entropy_bits).max(0.0);
            pairs.push(PairRecord {
                j,
                j_prime: jp,
                a,
                entropy_bits,
                trace_distance,
                trace_term: a * trace_distance,
                entropy_term: a * gap.sqrt(),
                support,
            });
        }
    }
    Ok(VarianceBoundReport {
        trace_distance_total: pairs.iter().map(|p| p.trace_term).sum(),
        entropy_total: pairs.iter().map(|p| p.entropy_term).sum(),
        exact_variance: exact_variance_lu_with_limit(psi0, &e, limit)?,
        pairs,
    })
}

/// Subsystem purities of a fixed state, cached by qubit mask.
struct PurityCache<'a> {
    psi: &'a StateVector,
    purity: HashMap<u64, f64>,
    entropy: HashMap<u64, f64>,
}

impl<'a> PurityCache<'a> {
    fn new(psi: &'a StateVector) -> Self {
        PurityCache {
            psi,
            purity: HashMap::new(),
            entropy: HashMap::new(),
        }
    }

    fn purity(&mut self, mask: u64) -> Result<f64> {
        if mask == 0 {
            return Ok(1.0);
        }
        if let Some(p) = self.purity.get(&mask) {
            return Ok(*p);
        }
        let q = mask_to_qubits(self.psi.n_qubits(), mask);
        let p = self.psi.reduced_density(&q)?.purity();
        self.purity.insert(mask, p);
        Ok(p)
    }

    fn entropy(&mut self, mask: u64) -> Result<f64> {
        if let Some(s) = self.entropy.get(&mask) {
            return Ok(*s);
        }
        let q = mask_to_qubits(self.psi.n_qubits(), mask);
        let s = self.psi.entanglement_entropy(&q)?;
        self.entropy.insert(mask, s);
        Ok(s)
    }
}

/// `E_LU[⟨S⟩²] = 3^{−|s|} Σ_{T⊆supp s} (−1)^{|s|−|T|} 2^{|T|} Tr ρ_T²`.
fn lu_second_moment(cache: &mut PurityCache<'_>, mask: u64) -> Result<f64> {
    let w = mask.count_ones() as i32;
    let mut total = 0.0;
    let mut sub = mask;
    loop {
        let t = sub.count_ones() as i32;
        let sign = if (w - t) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * 2f64.powi(t) * cache.purity(sub)?;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & mask;
    }
    Ok(total / 3f64.powi(w))
}

/// Exact variance of `s_E` over the local-unitary orbit of `psi0`.
pub fn exact_variance_lu(psi0: &StateVector, e: &PauliOperator) -> Result<f64> {
    exact_variance_lu_with_limit(psi0, e, DEFAULT_PAIR_LIMIT)
}

pub fn exact_variance_lu_with_limit(psi0: &StateVector, e: &PauliOperator, limit: usize) -> Result<f64> {
    exact_variance_lu_operator(psi0, &error_gram(e)?, limit)
}

/// Exact local-unitary variance of `⟨ψ|O|ψ⟩` for Hermitian `O`.
pub fn exact_variance_lu_operator(psi0: &StateVector, o: &PauliOperator, limit: usize) -> Result<f64> {
    let mut cache = PurityCache::new(psi0);
    let mut var = 0.0;
    for (key, b) in o.iter() {
        if key.is_identity() {
            continue;
        }
        let mask = key.x | key.z;
        if mask.count_ones() as usize > limit {
            return Err(Error::DenseLimit {
                what: "term support",
                n_qubits: mask.count_ones() as usize,
                limit,
            });
        }
        var += b.re * b.re * lu_second_moment(&mut cache, mask)?;
    }
    Ok(var)
}

/// Normalized traces `Tr(O^k)` for `k = 1..4`.
fn trace_powers(o: &PauliOperator) -> Result<[f64; 4]> {
    let d = 2f64.powi(o.n_qubits() as i32);
    let o2 = o.mul(o)?;
    Ok([
        d * o.normalized_trace().re,
        d * o.frobenius_norm_sq(),
        d * o2.trace_product(o)?.re,
        d * o2.frobenius_norm_sq(),
    ])
}

/// `m1, m2, m3` of `s_E` under any unitary 3-design.
pub fn haar_moments(e: &PauliOperator) -> Result<(f64, f64, f64)> {
    moments_of_operator(&error_gram(e)?)
}

pub fn moments_of_operator(o: &PauliOperator) -> Result<(f64, f64, f64)> {
    let d = 2f64.powi(o.n_qubits() as i32);
    let [t1, t2, t3, _] = trace_powers(o)?;
    Ok((
        t1 / d,
        (t1 * t1 + t2) / (d * (d + 1.0)),
        (t1.powi(3) + 3.0 * t2 * t1 + 2.0 * t3) / (d * (d + 1.0) * (d + 2.0)),
    ))
}

/// `24B = 6Tr(O⁴) + 8Tr(O³)Tr(O) + 3Tr(O²)² + 6Tr(O²)Tr(O)² + Tr(O)⁴` with `O = E†E`.
pub fn compute_b(e: &PauliOperator) -> Result<f64> {
    compute_b_of_operator(&error_gram(e)?)
}

pub fn compute_b_of_operator(o: &PauliOperator) -> Result<f64> {
    let [t1, t2, t3, t4] = trace_powers(o)?;
    Ok(b_from_traces(t1, t2, t3, t4))
}

fn b_from_traces(t1: f64, t2: f64, t3: f64, t4: f64) -> f64 {
    (6.0 * t4 + 8.0 * t3 * t1 + 3.0 * t2 * t2 + 6.0 * t2 * t1 * t1 + t1.powi(4)) / 24.0
}

/// Dense evaluation of `B`.
pub fn compute_b_dense(o: &DenseMatrix) -> f64 {
    let o2 = o * o;
    let t1 = o.trace().re;
    let t2 = o2.trace().re;
    let t3 = (&o2 * o).trace().re;
    let t4 = (&o2 * &o2).trace().re;
    b_from_traces(t1, t2, t3, t4)
}

/// `A = (1/24d²) Σ_P [6Tr((OP)⁴) + 8Tr((OP)³)Tr(OP) + 3Tr((OP)²)² + 6Tr((OP)²)Tr(OP)² + Tr(OP)⁴]`.
///
/// Summing the Pauli characters in closed form leaves
/// `24A = 12d Σ o_p²o_q²χ(p,q) + 8 Σ o_p o_{q1} o_{q2} o_{q3} χ(p,q2) Tr(Q1Q2Q3P)/d + 4d² Σ o_q⁴`,
/// where `χ = ±1` marks commuting or anticommuting pairs and `q1 = q2·q3·p`.
pub fn compute_a(e: &PauliOperator) -> Result<f64> {
    compute_a_of_operator(&error_gram(e)?, DEFAULT_TERM_BUDGET)
}

pub fn compute_a_of_operator(o: &PauliOperator, budget: usize) -> Result<f64> {
    if o.len() > budget {
        return Err(Error::TermBudget {
            terms: o.len(),
            budget,
        });
    }
    let d = 2f64.powi(o.n_qubits() as i32);
    let terms: Vec<(PauliKey, f64)> = o.iter().map(|(k, c)| (*k, c.re)).collect();
    let lookup: HashMap<PauliKey, f64> = terms.iter().copied().collect();
    let chi = |a: &PauliKey, b: &PauliKey| if a.anticommutes(b) { -1.0 } else { 1.0 };

    let s4: f64 = terms.iter().map(|(_, c)| c.powi(4)).sum();
    let per_p: Vec<(f64, f64)> = terms
        .par_iter()
        .map(|(p, op)| {
            let mut s_chi = 0.0;
            let mut u = 0.0;
            for (q2, o2) in &terms {
                let c = chi(p, q2);
                s_chi += op * op * o2 * o2 * c;
                for (q3, o3) in &terms {
                    let q1 = PauliKey::new(q2.x ^ q3.x ^ p.x, q2.z ^ q3.z ^ p.z);
                    let Some(o1) = lookup.get(&q1) else { continue };
                    let (k1, r12) = q1.mul(q2);
                    let (k2, r123) = r12.mul(q3);
                    let (k3, _) = r123.mul(p);
                    let phase = i_pow(k1 + k2 + k3).re;
                    u += op * o1 * o2 * o3 * c * phase;
                }
            }
            (s_chi, u)
        })
        .collect();
    let s_chi: f64 = per_p.iter().map(|v| v.0).sum();
    let u: f64 = per_p.iter().map(|v| v.1).sum();
    Ok((12.0 * d * s_chi + 8.0 * u + 4.0 * d * d * s4) / 24.0)
}

/// Brute-force `A` by dense traces over all `4^N` Pauli words.
pub fn compute_a_bruteforce(o: &DenseMatrix) -> Result<f64> {
    let d = o.nrows();
    let n = d.trailing_zeros() as usize;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::DenseLimit {
            what: "brute-force A",
            n_qubits: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut total = Complex64::default();
    for x in 0..d as u64 {
        for z in 0..d as u64 {
            let p = PauliString::new(n, x, z, 0)?.to_dense(n)?;
            let m = o * p;
            let m2 = &m * &m;
            let t1 = m.trace();
            let t2 = m2.trace();
            let t3 = (&m2 * &m).trace();
            let t4 = (&m2 * &m2).trace();
            total += t4 * 6.0 + t3 * t1 * 8.0 + t2 * t2 * 3.0 + t2 * t1 * t1 * 6.0 + t1 * t1 * t1 * t1;
        }
    }
    Ok(total.re / (24.0 * (d * d) as f64))
}

/// Fourth moment of `s_E` over the Clifford orbit of a state with magic `M`.
pub fn fourth_moment(a: f64, b: f64, d: f64, magic: f64) -> f64 {
    let num = 24.0 * d * (b - a) + 6.0 * (1.0 - magic) * ((d * d + 3.0 * d) * a - 4.0 * b);
    num / fourth_moment_denominator(d)
}

/// `d(d²−1)(d+2)(d+4)`.
pub fn fourth_moment_denominator(d: f64) -> f64 {
    d * (d * d - 1.0) * (d + 2.0) * (d + 4.0)
}

/// `Kur(M) = α + βM` over the global Clifford ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KurtosisLaw {
    pub alpha: f64,
    pub beta: f64,
    /// `A` and `B` of `E†E`.
    pub a: f64,
    pub b: f64,
    /// `A` and `B` of `E†E − m1·I`, used for α and β.
    pub a_centered: f64,
    pub b_centered: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub variance: f64,
    pub d: f64,
}

impl KurtosisLaw {
    pub fn kurtosis(&self, magic: f64) -> f64 {
        self.alpha + self.beta * magic
    }

    /// Raw fourth moment `E[s_E⁴]`.
    pub fn fourth_moment(&self, magic: f64) -> f64 {
        fourth_moment(self.a, self.b, self.d, magic)
    }

    /// `(d²+3d)A − 4B`, nonnegative by the moment lemma.
    pub fn lemma_gap(&self) -> f64 {
        (self.d * self.d + 3.0 * self.d) * self.a - 4.0 * self.b
    }

    pub fn lemma_gap_centered(&self) -> f64 {
        (self.d * self.d + 3.0 * self.d) * self.a_centered - 4.0 * self.b_centered
    }

    /// Skewness over the ensemble.
    pub fn skewness(&self) -> f64 {
        let mu3 = self.m3 - 3.0 * self.m2 * self.m1 + 2.0 * self.m1.powi(3);
        mu3 / self.variance.powf(1.5)
    }
}

pub fn kurtosis_law(e: &PauliOperator) -> Result<KurtosisLaw> {
    kurtosis_law_of_operator(&error_gram(e)?, DEFAULT_TERM_BUDGET)
}

pub fn kurtosis_law_of_operator(o: &PauliOperator, budget: usize) -> Result<KurtosisLaw> {
    let n = o.n_qubits();
    let d = 2f64.powi(n as i32);
    let (m1, m2, m3) = moments_of_operator(o)?;
    let centered = o.sub(&PauliOperator::scaled_identity(n, Complex64::new(m1, 0.0)))?;
    let [_, t2c, _, _] = trace_powers(&centered)?;
    let variance = t2c / (d * (d + 1.0));
    if variance <= 1e-300 || centered.frobenius_norm_sq() <= 1e-24 * (1.0 + m1 * m1) {
        return Err(Error::Degenerate("s_E is constant over the Clifford orbit".into()));
    }
    let a_centered = compute_a_of_operator(&centered, budget)?;
    let b_centered = compute_b_of_operator(&centered)?;
    let a = compute_a_of_operator(o, budget)?;
    let b = compute_b_of_operator(o)?;
    let den = fourth_moment_denominator(d) * variance * variance;
    let gap = (d * d + 3.0 * d) * a_centered - 4.0 * b_centered;
    Ok(KurtosisLaw {
        alpha: (24.0 * d * (b_centered - a_centered) + 6.0 * gap) / den,
        beta: -6.0 * gap / den,
        a,
        b,
        a_centered,
        b_centered,
        m1,
        m2,
        m3,
        variance,
        d,
    })
}

/// `Σ_P Tr(OPOP)` by brute force.
pub fn sum_pauli_conjugation(o: &DenseMatrix) -> Result<Complex64> {
    let d = o.nrows();
    let n = d.trailing_zeros() as usize;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::DenseLimit {
            what: "Pauli conjugation sum",
            n_qubits: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut total = Complex64::default();
    for x in 0..d as u64 {
        for z in 0..d as u64 {
            let p = PauliString::new(n, x, z, 0)?.to_dense(n)?;
            let op = o * &p;
            total += (&op * &op).trace();
        }
    }
    Ok(total)
}

/// Chebyshev bound `1/k²` on `Pr[|X − μ| ≥ kσ]`.
pub fn chebyshev(k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Err(Error::InvalidArgument(format!("Chebyshev k = {k} must be positive")));
    }
    Ok((1.0 / (k * k)).min(1.0))
}

/// One-sided bound on `Pr[X − μ ≥ tσ]` from skewness `κ3` and kurtosis `κ4`.
pub fn tail_bound(kappa3: f64, kappa4: f64, t: f64) -> Result<f64> {
    let slack = kappa4 - kappa3 * kappa3 - 1.0;
    if slack < 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "κ4 = {kappa4} must exceed κ3² + 1 = {}",
            kappa3 * kappa3 + 1.0
        )));
    }
    let t_min = (kappa3 + (kappa3 * kappa3 + 4.0).sqrt()) / 2.0;
    if t <= t_min {
        return Err(Error::InvalidArgument(format!("t = {t} must exceed {t_min}")));
    }
    let q = t * t - t * kappa3 - 1.0;
    Ok(1.0 / (1.0 + t * t + q * q / slack))
}

/// Long-time variance bound for the triangle sum `e_r = Σ_k ‖D U_p^k ψ‖`,
/// `D = U_p(δt) − U₀(δt)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongTimeBound {
    /// Entropy bound on `Var ‖D U_p^k ψ‖²` for each `k`.
    pub step_bounds: Vec<f64>,
    /// Exact local-unitary variance of `‖D U_p^k ψ‖²` for each `k`.
    pub step_exact: Vec<f64>,
    /// `r Σ_k (1/√2) √step_bound_k`.
    pub total: f64,
}

/// Precomputed `O_k = U_p^{†k} D†D U_p^k` for `k < r`, shared across starting states.
#[derive(Clone, Debug)]
pub struct LongTimeOperators {
    ops: Vec<PauliOperator>,
}

impl LongTimeOperators {
    pub fn new(spec: &HamiltonianSpec, pf: &ProductFormula, dt: f64, r: usize) -> Result<Self> {
        let n = spec.n_qubits();
        if n > LONG_TIME_LIMIT {
            return Err(Error::DenseLimit {
                what: "long-time bound",
                n_qubits: n,
                limit: LONG_TIME_LIMIT,
            });
        }
        let up = pf_unitary(spec, pf, dt, LONG_TIME_LIMIT)?;
        let u0 = Propagator::new(spec)?.unitary(dt);
        let dmat = &up - u0;
        let mut ok = dmat.adjoint() * dmat;
        let mut ops = Vec::with_capacity(r);
        for _ in 0..r {
            let herm = (&ok + ok.adjoint()) * Complex64::new(0.5, 0.0);
            ops.push(PauliOperator::from_dense(&herm)?);
            ok = up.adjoint() * ok * &up;
        }
        Ok(LongTimeOperators { ops })
    }

    pub fn operators(&self) -> &[PauliOperator] {
        &self.ops
    }

    /// Bound for one starting state; each Pauli term of `O_k` is its own pair group.
    pub fn bound(&self, psi0: &StateVector) -> Result<LongTimeBound> {
        let mut cache = PurityCache::new(psi0);
        let mut step_bounds = Vec::with_capacity(self.ops.len());
        let mut step_exact = Vec::with_capacity(self.ops.len());
        for o in &self.ops {
            let mut bound = 0.0;
            let mut exact = 0.0;
            for (key, b) in o.iter() {
                if key.is_identity() {
                    continue;
                }
                let mask = key.x | key.z;
                let w = mask.count_ones() as f64;
                let s = cache.entropy(mask)?;
                let b2 = b.re * b.re;
                bound += 2.0 * b2 * (2.0 * w - 2.0 * s).max(0.0).sqrt();
                exact += b2 * lu_second_moment(&mut cache, mask)?;
            }
            step_bounds.push(bound);
            step_exact.push(exact);
        }
        let r = self.ops.len() as f64;
        let total = r * step_bounds
            .iter()
            .map(|b| b.sqrt() / std::f64::consts::SQRT_2)
            .sum::<f64>();
        Ok(LongTimeBound {
            step_bounds,
            step_exact,
            total,
        })
    }
}
