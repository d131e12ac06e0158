//! Pauli spectra, stabilizer purities and the linear stabilizer entropy.

use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::clifford::{apply_circuit, CliffordTableau};
use crate::error::{Error, Result};
use crate::gates;
use crate::pauli::{walsh_hadamard, PauliKey, PauliString};
use crate::statevector::StateVector;

pub const DEFAULT_SPECTRUM_LIMIT: usize = 12;

/// `|⟨ψ|σ_{x,z}|ψ⟩|²` stored at index `x·2^N + z`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSpectrum {
    n_qubits: usize,
    values: Vec<f64>,
}

impl PauliSpectrum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, key: PauliKey) -> f64 {
        self.values[((key.x as usize) << self.n_qubits) | key.z as usize]
    }

    /// Values in ascending order, for comparing spectra up to permutation.
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// `(1/d) Σ_P |⟨P⟩|^{2α}`.
    pub fn purity(&self, alpha: f64) -> f64 {
        let d = (1usize << self.n_qubits) as f64;
        self.values.iter().map(|v| v.powf(alpha)).sum::<f64>() / d
    }

    /// Little-endian `f64` dump of all `4^N` values.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }
}

/// All `4^N` squared Pauli expectations with one Walsh–Hadamard transform per X mask.
pub fn pauli_spectrum(psi: &StateVector) -> Result<PauliSpectrum> {
    pauli_spectrum_with_limit(psi, DEFAULT_SPECTRUM_LIMIT)
}

pub fn pauli_spectrum_with_limit(psi: &StateVector, limit: usize) -> Result<PauliSpectrum> {
    let n = psi.n_qubits();
    if n > limit {
        return Err(Error::DenseLimit {
            what: "Pauli spectrum",
            n_qubits: n,
            limit,
        });
    }
    let d = psi.dim();
    let amps = psi.amplitudes();
    let mut values = vec![0.0; d * d];
    values.par_chunks_mut(d).enumerate().for_each(|(x, out)| {
        let mut w: Vec<Complex64> = (0..d).map(|c| amps[c ^ x].conj() * amps[c]).collect();
        walsh_hadamard(&mut w);
        for (o, v) in out.iter_mut().zip(&w) {
            *o = v.norm_sqr();
        }
    });
    Ok(PauliSpectrum { n_qubits: n, values })
}

/// One expectation value per Pauli word; `O(8^N)`.
pub fn pauli_spectrum_naive(psi: &StateVector) -> Result<PauliSpectrum> {
    let n = psi.n_qubits();
    let d = psi.dim() as u64;
    let mut values = Vec::with_capacity((d * d) as usize);
    for x in 0..d {
        for z in 0..d {
            let p = PauliString::new(n, x, z, 0)?;
            let v = psi.inner(&psi.apply_pauli(&p)?)?;
            values.push(v.norm_sqr());
        }
    }
    Ok(PauliSpectrum { n_qubits: n, values })
}

pub fn stabilizer_purity(psi: &StateVector, alpha: f64) -> Result<f64> {
    if alpha < 1.0 {
        return Err(Error::InvalidArgument(format!("purity order {alpha} must be at least 1")));
    }
    Ok(pauli_spectrum(psi)?.purity(alpha))
}

/// Linear stabilizer entropy `1 − P₂`.
pub fn magic(psi: &StateVector) -> Result<f64> {
    let m = 1.0 - stabilizer_purity(psi, 2.0)?;
    Ok(if m.abs() < 1e-13 { 0.0 } else { m })
}

/// `C₂ (T^{⊗k} ⊗ I) C₁ |0…0⟩` with fresh uniform Cliffords, for every `k` in `k_list`.
pub fn magic_ladder_states<R: Rng + ?Sized>(
    n: usize,
    k_list: &[usize],
    rng: &mut R,
) -> Result<Vec<(StateVector, f64)>> {
    if let Some(&k) = k_list.iter().find(|&&k| k > n) {
        return Err(Error::InvalidArgument(format!("T count {k} exceeds {n} qubits")));
    }
    k_list
        .iter()
        .map(|&k| {
            let c1 = CliffordTableau::random(n, rng);
            let c2 = CliffordTableau::random(n, rng);
            let psi = t_ladder_state(&c1, &c2, k)?;
            let m = magic(&psi)?;
            Ok((psi, m))
        })
        .collect()
}

/// `C₂ (T^{⊗k} ⊗ I) C₁ |0…0⟩` for given Cliffords.
pub fn t_ladder_state(c1: &CliffordTableau, c2: &CliffordTableau, k: usize) -> Result<StateVector> {
    let n = c1.n_qubits();
    let mut psi = StateVector::zero_state(n);
    apply_circuit(&mut psi, &c1.synthesize()?);
    let t = gates::t_gate();
    for q in 0..k {
        psi.apply_1q(&t, q)?;
    }
    apply_circuit(&mut psi, &c2.synthesize()?);
    Ok(psi)
}
