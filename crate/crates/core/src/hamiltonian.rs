//! Spin-chain Hamiltonians, their product-formula partitions and exact evolution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{DenseMatrix, Pauli, PauliKey, PauliOperator, PauliString, DEFAULT_DENSE_LIMIT};
use crate::statevector::StateVector;

const HERMITIAN_TOL: f64 = 1e-12;

/// `H = Σ_l H_l` with every group internally commuting.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    total: PauliOperator,
    partition: Vec<PauliOperator>,
}

fn site_term(n: usize, sites: &[(usize, Pauli)], c: f64) -> PauliOperator {
    let s = PauliString::on_sites(n, sites).expect("sites within range");
    PauliOperator::from_string(s).scale_real(c)
}

fn sum(n: usize, ops: impl IntoIterator<Item = PauliOperator>) -> PauliOperator {
    ops.into_iter()
        .fold(PauliOperator::zero(n), |acc, op| acc.add(&op).expect("same qubit count"))
}

fn field(n: usize, p: Pauli, h: f64) -> PauliOperator {
    sum(n, (0..n).map(|j| site_term(n, &[(j, p)], h)))
}

fn bonds(n: usize, p: Pauli, j: f64) -> PauliOperator {
    sum(n, (0..n - 1).map(|k| site_term(n, &[(k, p), (k + 1, p)], j)))
}

fn require_chain(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("chain needs at least 2 qubits, got {n}")));
    }
    Ok(())
}

impl HamiltonianSpec {
    /// Validates a partition and sums it.
    pub fn from_partition(n_qubits: usize, partition: Vec<PauliOperator>) -> Result<Self> {
        if partition.is_empty() {
            return Err(Error::InvalidPartition("no groups".into()));
        }
        for (l, g) in partition.iter().enumerate() {
            if g.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch {
                    left: n_qubits,
                    right: g.n_qubits(),
                });
            }
            if !g.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::InvalidPartition(format!("group {l} is not Hermitian")));
            }
            let keys: Vec<PauliKey> = g.iter().map(|(k, _)| *k).collect();
            for (i, a) in keys.iter().enumerate() {
                if keys[i + 1..].iter().any(|b| a.anticommutes(b)) {
                    return Err(Error::NonCommutingGroup { group: l });
                }
            }
        }
        let total = sum(n_qubits, partition.iter().cloned());
        Ok(HamiltonianSpec {
            n_qubits,
            total,
            partition,
        })
    }

    /// Mixed-field Ising chain `h_x ΣX + h_y ΣY + J ΣXX`, split as `[X terms, Y terms]`.
    pub fn qimf(n: usize, h_x: f64, h_y: f64, j: f64) -> Result<Self> {
        require_chain(n)?;
        let a = field(n, Pauli::X, h_x).add(&bonds(n, Pauli::X, j))?;
        let b = field(n, Pauli::Y, h_y);
        Self::from_partition(n, vec![a, b])
    }

    /// Heisenberg chain `h ΣX + J Σ(XX + YY + ZZ)`, split as `[X field + XX, YY, ZZ]`.
    pub fn heisenberg(n: usize, h: f64, j: f64) -> Result<Self> {
        require_chain(n)?;
        let g0 = field(n, Pauli::X, h).add(&bonds(n, Pauli::X, j))?;
        Self::from_partition(n, vec![g0, bonds(n, Pauli::Y, j), bonds(n, Pauli::Z, j)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn total(&self) -> &PauliOperator {
        &self.total
    }

    pub fn partition(&self) -> &[PauliOperator] {
        &self.partition
    }

    pub fn n_terms(&self) -> usize {
        self.total.len()
    }

    /// Real coefficients of group `l`.
    pub fn group_terms(&self, l: usize) -> Vec<(PauliKey, f64)> {
        self.partition[l].iter().map(|(k, c)| (*k, c.re)).collect()
    }

    pub fn to_dense(&self, limit: usize) -> Result<DenseMatrix> {
        self.total.to_dense(limit)
    }
}

/// Spectral decomposition of `H`, reused for `e^{−iHt}` at many `t`.
#[derive(Clone, Debug)]
pub struct Propagator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &HamiltonianSpec) -> Result<Self> {
        Self::with_limit(h, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_limit(h: &HamiltonianSpec, limit: usize) -> Result<Self> {
        if h.n_qubits > limit {
            return Err(Error::DenseLimit {
                what: "exact evolution",
                n_qubits: h.n_qubits,
                limit,
            });
        }
        let eig = h.to_dense(limit)?.symmetric_eigen();
        Ok(Propagator {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `e^{−iHt}` as a dense matrix.
    pub fn unitary(&self, t: f64) -> DenseMatrix {
        let phases = self.energies.map(|e| Complex64::from_polar(1.0, -e * t));
        let mut scaled = self.vectors.clone();
        for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
            col *= *p;
        }
        scaled * self.vectors.adjoint()
    }

    /// `e^{−iHt}|ψ⟩` without forming the full unitary.
    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.vectors.nrows() {
            return Err(Error::QubitMismatch {
                left: self.vectors.nrows().trailing_zeros() as usize,
                right: psi.n_qubits(),
            });
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        let mut coeffs = self.vectors.adjoint() * v;
        for (c, e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * coeffs;
        StateVector::from_amplitudes(out.as_slice().to_vec())
    }
}

/// `e^{−iHt}` via a fresh eigendecomposition.
pub fn exact_evolution_operator(h: &HamiltonianSpec, t: f64) -> Result<DenseMatrix> {
    Ok(Propagator::new(h)?.unitary(t))
}

pub fn evolve(psi: &StateVector, h: &HamiltonianSpec, t: f64) -> Result<StateVector> {
    Propagator::new(h)?.evolve(psi, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn qimf_structure() {
        let h = HamiltonianSpec::qimf(5, 0.8090, 0.9045, 1.0).unwrap();
        assert_eq!(h.n_terms(), 2 * 5 + 4);
        assert_eq!(h.partition().len(), 2);
        let xx = PauliString::on_sites(5, &[(1, Pauli::X), (2, Pauli::X)]).unwrap();
        assert_eq!(h.total().coefficient(&xx.key()).re, 1.0);
        assert!(HamiltonianSpec::qimf(1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn heisenberg_partition_sums_to_total() {
        let h = HamiltonianSpec::heisenberg(4, 0.2, 1.0).unwrap();
        assert_eq!(h.partition().len(), 3);
        assert_eq!(h.n_terms(), 4 + 3 * 3);
        let mut acc = PauliOperator::zero(4);
        for g in h.partition() {
            acc = acc.add(g).unwrap();
        }
        assert!(acc.sub(h.total()).unwrap().is_zero());
    }

    #[test]
    fn non_commuting_group_rejected() {
        let g = PauliOperator::term("XI", 1.0)
            .unwrap()
            .add(&PauliOperator::term("ZI", 1.0).unwrap())
            .unwrap();
        assert!(matches!(
            HamiltonianSpec::from_partition(2, vec![g]),
            Err(Error::NonCommutingGroup { group: 0 })
        ));
    }

    #[test]
    fn evolution_group_property_and_energy() {
        let h = HamiltonianSpec::qimf(4, 0.8090, 0.9045, 1.0).unwrap();
        let prop = Propagator::new(&h).unwrap();
        let u0 = prop.unitary(0.0);
        assert!((u0 - DenseMatrix::identity(16, 16)).iter().all(|v| v.norm() < 1e-12));
        let prod = prop.unitary(0.7) * prop.unitary(-0.7);
        assert!((prod - DenseMatrix::identity(16, 16)).iter().all(|v| v.norm() < 1e-10));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = StateVector::random(4, &mut rng);
        let a = prop.evolve(&prop.evolve(&psi, 0.3).unwrap(), 0.5).unwrap();
        let b = prop.evolve(&psi, 0.8).unwrap();
        assert!(a.distance(&b).unwrap() < 1e-9);
        let e0 = psi.expectation(h.total()).unwrap().re;
        let e1 = b.expectation(h.total()).unwrap().re;
        assert!((e0 - e1).abs() < 1e-8);
        let dense = psi.apply_matrix(&prop.unitary(0.8)).unwrap();
        assert!(dense.distance(&b).unwrap() < 1e-10);
    }
}
