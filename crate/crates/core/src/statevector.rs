//! Dense statevectors, reduced density matrices and entanglement entropy.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{unitarity_defect, Gate1, Gate2};
use crate::pauli::{qubit_bit, DenseMatrix, PauliKey, PauliOperator, PauliString, MAX_QUBITS};

const UNITARY_TOL: f64 = 1e-10;
const EIGEN_FLOOR: f64 = 1e-12;
/// Largest qubit count accepted by the JSON form.
pub const JSON_QUBIT_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!((1..=30).contains(&n_qubits), "unsupported qubit count");
        let mut amps = vec![Complex64::default(); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let d = amps.len();
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {d} is not a power of two"
            )));
        }
        Ok(StateVector {
            n_qubits: d.trailing_zeros() as usize,
            amps,
        })
    }

    /// Haar-random pure state from a normalized complex Gaussian vector.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let d = 1usize << n_qubits;
        let amps = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = StateVector { n_qubits, amps };
        s.normalize();
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check(other.n_qubits)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: n,
            });
        }
        Ok(())
    }

    fn check_index(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: q,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_1q(&mut self, gate: &Gate1, qubit: usize) -> Result<()> {
        self.check_index(qubit)?;
        let defect = unitarity_defect(gate);
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        self.apply_1q_unchecked(gate, qubit);
        Ok(())
    }

    pub(crate) fn apply_1q_unchecked(&mut self, g: &Gate1, qubit: usize) {
        let b = qubit_bit(self.n_qubits, qubit) as usize;
        let (g00, g01, g10, g11) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
        for block in (0..self.amps.len()).step_by(2 * b) {
            for i in block..block + b {
                let a0 = self.amps[i];
                let a1 = self.amps[i + b];
                self.amps[i] = g00 * a0 + g01 * a1;
                self.amps[i + b] = g10 * a0 + g11 * a1;
            }
        }
    }

    /// Applies a 4×4 gate whose row index is `2·bit(q0) + bit(q1)`.
    pub fn apply_2q(&mut self, gate: &Gate2, q0: usize, q1: usize) -> Result<()> {
        self.check_index(q0)?;
        self.check_index(q1)?;
        if q0 == q1 {
            return Err(Error::InvalidArgument("two-qubit gate on a single qubit".into()));
        }
        let defect = unitarity_defect(gate);
        if defect > UNITARY_TOL {
            return Err(Error::NonUnitary(defect));
        }
        let b0 = qubit_bit(self.n_qubits, q0) as usize;
        let b1 = qubit_bit(self.n_qubits, q1) as usize;
        let offs = [0, b1, b0, b0 | b1];
        for i in 0..self.amps.len() {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let v: [Complex64; 4] = std::array::from_fn(|k| self.amps[i | offs[k]]);
            for r in 0..4 {
                self.amps[i | offs[r]] = (0..4).map(|k| gate[(r, k)] * v[k]).sum();
            }
        }
        Ok(())
    }

    pub(crate) fn apply_h(&mut self, q: usize) {
        let b = qubit_bit(self.n_qubits, q) as usize;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for block in (0..self.amps.len()).step_by(2 * b) {
            for i in block..block + b {
                let a0 = self.amps[i];
                let a1 = self.amps[i + b];
                self.amps[i] = (a0 + a1) * h;
                self.amps[i + b] = (a0 - a1) * h;
            }
        }
    }

    pub(crate) fn apply_phase_on_bits(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let c = qubit_bit(self.n_qubits, control) as usize;
        let t = qubit_bit(self.n_qubits, target) as usize;
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    pub(crate) fn apply_x(&mut self, q: usize) {
        let b = qubit_bit(self.n_qubits, q) as usize;
        for i in 0..self.amps.len() {
            if i & b == 0 {
                self.amps.swap(i, i | b);
            }
        }
    }

    pub fn apply_pauli(&self, s: &PauliString) -> Result<StateVector> {
        self.check(s.n_qubits())?;
        let key = s.key();
        let pre = s.coefficient();
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (c, a) in self.amps.iter().enumerate() {
            out[c ^ key.x as usize] = pre * key.column_phase(c as u64) * a;
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }

    /// `Σ c_P σ_P|ψ⟩` as a raw (unnormalized) amplitude vector.
    pub fn apply_operator(&self, op: &PauliOperator) -> Result<Vec<Complex64>> {
        self.check(op.n_qubits())?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (key, coeff) in op.iter() {
            accumulate_pauli(&self.amps, key, *coeff, &mut out);
        }
        Ok(out)
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &PauliOperator) -> Result<Complex64> {
        let v = self.apply_operator(op)?;
        Ok(self.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum())
    }

    /// In place `ψ ← e^{−iθσ}ψ = cos θ ψ − i sin θ σψ` for an unsigned word `σ`.
    pub fn apply_pauli_rotation(&mut self, key: &PauliKey, theta: f64) {
        let (s, c) = theta.sin_cos();
        let mis = Complex64::new(0.0, -s);
        let x = key.x as usize;
        if x == 0 {
            for (i, a) in self.amps.iter_mut().enumerate() {
                *a *= c + mis * key.column_phase(i as u64);
            }
            return;
        }
        for i in 0..self.amps.len() {
            let j = i ^ x;
            if i > j {
                continue;
            }
            let ai = self.amps[i];
            let aj = self.amps[j];
            // σ|j⟩ = φ(j)|i⟩ and σ|i⟩ = φ(i)|j⟩
            self.amps[i] = ai * c + mis * key.column_phase(j as u64) * aj;
            self.amps[j] = aj * c + mis * key.column_phase(i as u64) * ai;
        }
    }

    pub fn apply_matrix(&self, m: &DenseMatrix) -> Result<StateVector> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "matrix {}x{} does not act on dimension {}",
                m.nrows(),
                m.ncols(),
                self.dim()
            )));
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let out = m * v;
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out.as_slice().to_vec(),
        })
    }

    /// Reduced state on `subset`; the first listed qubit becomes the most significant bit.
    pub fn reduced_density(&self, subset: &[usize]) -> Result<DensityMatrix> {
        let subset = self.normalize_subset(subset)?;
        let k = subset.len();
        let n = self.n_qubits;
        let env: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
        let da = 1usize << k;
        let de = 1usize << env.len();
        let mut psi = DMatrix::<Complex64>::zeros(da, de);
        for (idx, amp) in self.amps.iter().enumerate() {
            let a = gather_bits(idx, n, &subset);
            let e = gather_bits(idx, n, &env);
            psi[(a, e)] = *amp;
        }
        let rho = &psi * psi.adjoint();
        Ok(DensityMatrix { n_qubits: k, rho })
    }

    /// Von Neumann entropy of the marginal on `subset`, in bits.
    pub fn entanglement_entropy(&self, subset: &[usize]) -> Result<f64> {
        Ok(self.reduced_density(subset)?.entropy_bits())
    }

    fn normalize_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        for &q in &s {
            self.check_index(q)?;
        }
        Ok(s)
    }

    /// Binary form: little-endian `u64` qubit count, then `(re, im)` `f64` pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.n_qubits as u64).to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<StateVector> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)?;
        let n = u64::from_le_bytes(buf) as usize;
        if n == 0 || n > 30 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("bad qubit count {n} in header")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for _ in 0..1usize << n {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf);
            r.read_exact(&mut buf)?;
            amps.push(Complex64::new(re, f64::from_le_bytes(buf)));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn to_json(&self) -> Result<String> {
        if self.n_qubits > JSON_QUBIT_LIMIT {
            return Err(Error::DenseLimit {
                what: "statevector JSON",
                n_qubits: self.n_qubits,
                limit: JSON_QUBIT_LIMIT,
            });
        }
        let doc = StateJson {
            n_qubits: self.n_qubits,
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<StateVector> {
        let doc: StateJson = serde_json::from_str(s)?;
        if doc.amplitudes.len() != 1usize << doc.n_qubits {
            return Err(Error::Parse("amplitude count does not match n_qubits".into()));
        }
        Ok(StateVector {
            n_qubits: doc.n_qubits,
            amps: doc
                .amplitudes
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

/// `out += c · σ_key · v`.
pub(crate) fn accumulate_pauli(v: &[Complex64], key: &PauliKey, c: Complex64, out: &mut [Complex64]) {
    let x = key.x as usize;
    let base = c * crate::pauli::i_pow((key.x & key.z).count_ones());
    let z = key.z as usize;
    for (col, a) in v.iter().enumerate() {
        let sign = if (z & col).count_ones() & 1 == 1 { -base } else { base };
        out[col ^ x] += sign * a;
    }
}

fn gather_bits(idx: usize, n: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
}

/// Density matrix on a few qubits.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(rho: DMatrix<Complex64>) -> Result<Self> {
        let d = rho.nrows();
        if d != rho.ncols() || !d.is_power_of_two() {
            return Err(Error::InvalidArgument("density matrix must be 2^k square".into()));
        }
        Ok(DensityMatrix {
            n_qubits: d.trailing_zeros() as usize,
            rho,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn entropy_bits(&self) -> f64 {
        let s = self
            .eigenvalues()
            .into_iter()
            .map(|l| l.clamp(0.0, 1.0))
            .filter(|&l| l > EIGEN_FLOOR)
            .map(|l| -l * l.log2())
            .sum::<f64>();
        // pure marginals come out at roundoff level
        if s < EIGEN_FLOOR { 0.0 } else { s }
    }

    /// `Tr|ρ − I/d|`.
    pub fn distance_to_maximally_mixed(&self) -> f64 {
        let inv = 1.0 / self.dim() as f64;
        self.eigenvalues().iter().map(|l| (l - inv).abs()).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.rho - self.rho.adjoint()).iter().all(|v| v.norm() <= tol)
    }
}

/// Haar-random single-qubit unitary from a uniformly distributed unit quaternion.
pub fn random_haar_1q<R: Rng + ?Sized>(rng: &mut R) -> Gate1 {
    let mut g = [0.0f64; 4];
    loop {
        for v in &mut g {
            *v = rng.sample(StandardNormal);
        }
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-12 {
            g.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let a = Complex64::new(g[0], g[1]);
    let b = Complex64::new(g[2], g[3]);
    Gate1::new(a, -b.conj(), b, a.conj())
}
