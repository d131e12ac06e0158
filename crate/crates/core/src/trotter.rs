//! Product formulas, the first-order leading error operator and true Trotter errors.
//!
//! Stages are stored in operator-product order: `U = Π_k e^{−i c_k H_{l_k} δt}`
//! read left to right, so the last stage acts on the state first.

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, Propagator};
use crate::pauli::{DenseMatrix, PauliOperator};
use crate::statevector::StateVector;

#[derive(Clone, Debug, PartialEq)]
pub struct ProductFormula {
    order: u32,
    stages: Vec<(usize, f64)>,
}

fn merge(stages: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(stages.len());
    for (l, c) in stages {
        match out.last_mut() {
            Some((last, acc)) if *last == l => *acc += c,
            _ => out.push((l, c)),
        }
    }
    out
}

impl ProductFormula {
    /// `e^{−iH_1δt} e^{−iH_2δt} ⋯ e^{−iH_Lδt}`.
    pub fn pf1(n_groups: usize) -> Self {
        ProductFormula {
            order: 1,
            stages: (0..n_groups).map(|l| (l, 1.0)).collect(),
        }
    }

    /// Symmetric second-order splitting.
    pub fn pf2(n_groups: usize) -> Self {
        let mut stages: Vec<(usize, f64)> = (0..n_groups).map(|l| (l, 0.5)).collect();
        stages.extend((0..n_groups).rev().map(|l| (l, 0.5)));
        ProductFormula {
            order: 2,
            stages: merge(stages),
        }
    }

    /// Order-`p` formula: `1`, or even `p` via the Suzuki recursion.
    pub fn suzuki(order: u32, n_groups: usize) -> Result<Self> {
        match order {
            1 => return Ok(Self::pf1(n_groups)),
            2 => return Ok(Self::pf2(n_groups)),
            p if p % 2 == 1 || p == 0 => {
                return Err(Error::InvalidArgument(format!("product formula order {p} must be 1 or even")))
            }
            _ => {}
        }
        let mut pf = Self::pf2(n_groups);
        for k in 2..=order / 2 {
            let u = 1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * k as f64 - 1.0)));
            let scaled = |f: f64| pf.stages.iter().map(move |&(l, c)| (l, c * f));
            let mut stages = Vec::with_capacity(5 * pf.stages.len());
            stages.extend(scaled(u));
            stages.extend(scaled(u));
            stages.extend(scaled(1.0 - 4.0 * u));
            stages.extend(scaled(u));
            stages.extend(scaled(u));
            pf = ProductFormula {
                order: 2 * k,
                stages: merge(stages),
            };
        }
        Ok(pf)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn stages(&self) -> &[(usize, f64)] {
        &self.stages
    }

    pub fn n_groups(&self) -> usize {
        self.stages.iter().map(|(l, _)| l + 1).max().unwrap_or(0)
    }

    /// Total coefficient carried by group `l`.
    pub fn group_weight(&self, l: usize) -> f64 {
        self.stages.iter().filter(|(g, _)| *g == l).map(|(_, c)| c).sum()
    }
}

fn check_pf(h: &HamiltonianSpec, pf: &ProductFormula) -> Result<()> {
    if pf.n_groups() > h.partition().len() {
        return Err(Error::InvalidPartition(format!(
            "formula uses {} groups but the Hamiltonian has {}",
            pf.n_groups(),
            h.partition().len()
        )));
    }
    Ok(())
}

/// In place `ψ ← U_p(δt)ψ`.
pub fn pf_step_in_place(psi: &mut StateVector, h: &HamiltonianSpec, pf: &ProductFormula, dt: f64) -> Result<()> {
    check_pf(h, pf)?;
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::QubitMismatch {
            left: h.n_qubits(),
            right: psi.n_qubits(),
        });
    }
    for &(l, c) in pf.stages.iter().rev() {
        for (key, coeff) in h.partition()[l].iter() {
            psi.apply_pauli_rotation(key, coeff.re * c * dt);
        }
    }
    Ok(())
}

pub fn pf_step(psi: &StateVector, h: &HamiltonianSpec, pf: &ProductFormula, dt: f64) -> Result<StateVector> {
    let mut out = psi.clone();
    pf_step_in_place(&mut out, h, pf, dt)?;
    Ok(out)
}

/// Dense `U_p(δt)`, built column by column.
pub fn pf_unitary(h: &HamiltonianSpec, pf: &ProductFormula, dt: f64, limit: usize) -> Result<DenseMatrix> {
    let n = h.n_qubits();
    if n > limit {
        return Err(Error::DenseLimit {
            what: "product-formula unitary",
            n_qubits: n,
            limit,
        });
    }
    let d = 1usize << n;
    let mut m = DenseMatrix::zeros(d, d);
    for col in 0..d {
        let mut s = StateVector::basis(n, col);
        pf_step_in_place(&mut s, h, pf, dt)?;
        for (r, a) in s.amplitudes().iter().enumerate() {
            m[(r, col)] = *a;
        }
    }
    Ok(m)
}

/// Normalization of the first-order leading error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorConvention {
    /// `E = ½[A, B]`, so `U₀ − U₁ = Eδt² + O(δt³)`.
    #[default]
    Half,
    /// `E = [A, B]`.
    Full,
}

/// Leading PF1 error operator `½[A, B]` for a two-group partition.
pub fn leading_error_pf1(h: &HamiltonianSpec) -> Result<PauliOperator> {
    leading_error_pf1_with(h, ErrorConvention::Half)
}

pub fn leading_error_pf1_with(h: &HamiltonianSpec, conv: ErrorConvention) -> Result<PauliOperator> {
    let parts = h.partition();
    if parts.len() != 2 {
        return Err(Error::InvalidPartition(format!(
            "leading error needs exactly 2 groups, got {}",
            parts.len()
        )));
    }
    let comm = parts[0].commutator(&parts[1])?;
    Ok(match conv {
        ErrorConvention::Half => comm.scale_real(0.5),
        ErrorConvention::Full => comm,
    })
}

/// `s_E(ψ) = ‖E|ψ⟩‖²`.
pub fn s_e(psi: &StateVector, e: &PauliOperator) -> Result<f64> {
    Ok(psi.apply_operator(e)?.iter().map(|a| a.norm_sqr()).sum())
}

/// One-step and multi-step true errors with `U₀(δt)` held densely.
#[derive(Clone, Debug)]
pub struct TrotterErrorEvaluator {
    spec: HamiltonianSpec,
    pf: ProductFormula,
    dt: f64,
    u0: DenseMatrix,
    propagator: Propagator,
}

/// Long-time error and its per-step triangle decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct LongTimeError {
    /// `‖(U_p^r − U₀(rδt))ψ‖`.
    pub error: f64,
    /// `‖(U_p − U₀)U_p^k ψ‖` for `k = 0..r`.
    pub per_step: Vec<f64>,
}

impl LongTimeError {
    pub fn triangle_sum(&self) -> f64 {
        self.per_step.iter().sum()
    }
}

impl TrotterErrorEvaluator {
    pub fn new(spec: &HamiltonianSpec, pf: &ProductFormula, dt: f64) -> Result<Self> {
        check_pf(spec, pf)?;
        let propagator = Propagator::new(spec)?;
        let u0 = propagator.unitary(dt);
        Ok(TrotterErrorEvaluator {
            spec: spec.clone(),
            pf: pf.clone(),
            dt,
            u0,
            propagator,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn formula(&self) -> &ProductFormula {
        &self.pf
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn exact_step(&self, psi: &StateVector) -> Result<StateVector> {
        psi.apply_matrix(&self.u0)
    }

    /// `‖(U₀(δt) − U_p(δt))|ψ⟩‖`.
    pub fn one_step(&self, psi: &StateVector) -> Result<f64> {
        let exact = self.exact_step(psi)?;
        let approx = pf_step(psi, &self.spec, &self.pf, self.dt)?;
        exact.distance(&approx)
    }

    /// `‖(U₀ − U_p)ψ‖² / δt^{2p+2}`.
    pub fn s_hat(&self, psi: &StateVector) -> Result<f64> {
        if self.dt <= 0.0 {
            return Err(Error::InvalidArgument("δt must be positive".into()));
        }
        let e = self.one_step(psi)?;
        Ok(e * e / self.dt.powi(2 * self.pf.order as i32 + 2))
    }

    pub fn long_time(&self, psi: &StateVector, r: usize) -> Result<LongTimeError> {
        let mut cur = psi.clone();
        let mut per_step = Vec::with_capacity(r);
        for _ in 0..r {
            let exact = self.exact_step(&cur)?;
            pf_step_in_place(&mut cur, &self.spec, &self.pf, self.dt)?;
            per_step.push(exact.distance(&cur)?);
        }
        let target = self.propagator.evolve(psi, self.dt * r as f64)?;
        Ok(LongTimeError {
            error: cur.distance(&target)?,
            per_step,
        })
    }
}

/// `‖(U₀(δt) − U_p(δt))|ψ⟩‖` with a fresh propagator.
pub fn true_error_one_step(psi: &StateVector, h: &HamiltonianSpec, pf: &ProductFormula, dt: f64) -> Result<f64> {
    TrotterErrorEvaluator::new(h, pf, dt)?.one_step(psi)
}

/// `‖(U_p(δt)^r − U₀(rδt))|ψ⟩‖` with a fresh propagator.
pub fn true_error_long(psi: &StateVector, h: &HamiltonianSpec, pf: &ProductFormula, dt: f64, r: usize) -> Result<f64> {
    Ok(TrotterErrorEvaluator::new(h, pf, dt)?.long_time(psi, r)?.error)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    crate::stats::ls_slope(&lx, &ly)
}
