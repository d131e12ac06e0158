//! Clifford tableaux: uniform sampling, synthesis into `{H, S, CNOT, X, Z}` and
//! application to statevectors.
//!
//! Row `q` of a tableau holds `C X_q C†` and row `n + q` holds `C Z_q C†`, each a
//! Hermitian Pauli word with a sign.

use std::collections::{HashMap, VecDeque};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Gate1;
use crate::pauli::{qubit_bit, PauliKey, PauliString, MAX_QUBITS};
use crate::statevector::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
    X(usize),
    Z(usize),
}

impl Gate {
    /// Inverse as a short sequence of gates from the same set.
    pub fn inverse(self) -> Vec<Gate> {
        match self {
            Gate::S(q) => vec![Gate::S(q); 3],
            g => vec![g],
        }
    }
}

/// Replaces `s` by `g s g†`.
pub fn conjugate_by_gate(s: &mut PauliString, gate: Gate) {
    let n = s.n_qubits();
    let (mut x, mut z) = (s.x_mask(), s.z_mask());
    let mut sign = s.phase_exp() >> 1;
    let odd = s.phase_exp() & 1;
    let bit = |q: usize| qubit_bit(n, q);
    let flag = |m: u64, b: u64| (m & b != 0) as u8;
    match gate {
        Gate::H(q) => {
            let b = bit(q);
            sign ^= flag(x, b) & flag(z, b);
            let (xb, zb) = (x & b, z & b);
            x = (x & !b) | zb;
            z = (z & !b) | xb;
        }
        Gate::S(q) => {
            let b = bit(q);
            sign ^= flag(x, b) & flag(z, b);
            z ^= x & b;
        }
        Gate::Cnot(a, t) => {
            let (ba, bt) = (bit(a), bit(t));
            let (xa, za, xt, zt) = (flag(x, ba), flag(z, ba), flag(x, bt), flag(z, bt));
            sign ^= xa & zt & (xt ^ za ^ 1);
            if xa == 1 {
                x ^= bt;
            }
            if zt == 1 {
                z ^= ba;
            }
        }
        Gate::X(q) => sign ^= flag(z, bit(q)),
        Gate::Z(q) => sign ^= flag(x, bit(q)),
    }
    *s = PauliString::from_key(n, PauliKey::new(x, z), (sign << 1) | odd);
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n_qubits: usize,
    rows: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n_qubits: usize) -> Self {
        let rows = (0..2 * n_qubits)
            .map(|r| {
                let b = qubit_bit(n_qubits, r % n_qubits);
                let key = if r < n_qubits {
                    PauliKey::new(b, 0)
                } else {
                    PauliKey::new(0, b)
                };
                PauliString::from_key(n_qubits, key, 0)
            })
            .collect();
        CliffordTableau { n_qubits, rows }
    }

    /// Builds a tableau from the `2n` generator images, checking the commutation relations.
    pub fn from_rows(n_qubits: usize, rows: Vec<PauliString>) -> Result<Self> {
        if rows.len() != 2 * n_qubits {
            return Err(Error::InvalidTableau(format!(
                "expected {} rows, got {}",
                2 * n_qubits,
                rows.len()
            )));
        }
        let tab = CliffordTableau { n_qubits, rows };
        tab.validate()?;
        Ok(tab)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        for (i, r) in self.rows.iter().enumerate() {
            if r.n_qubits() != n {
                return Err(Error::InvalidTableau(format!("row {i} has wrong qubit count")));
            }
            if !r.is_hermitian() {
                return Err(Error::InvalidTableau(format!("row {i} is not Hermitian")));
            }
        }
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let should_anticommute = j == i + n;
                let anti = self.rows[i].key().anticommutes(&self.rows[j].key());
                if anti != should_anticommute {
                    return Err(Error::InvalidTableau(format!(
                        "rows {i} and {j} violate the symplectic relations"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn rows(&self) -> &[PauliString] {
        &self.rows
    }

    pub fn x_image(&self, q: usize) -> &PauliString {
        &self.rows[q]
    }

    pub fn z_image(&self, q: usize) -> &PauliString {
        &self.rows[self.n_qubits + q]
    }

    pub fn signs(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.phase_exp() == 2).collect()
    }

    /// Tableau of the circuit that applies `gates` in order.
    pub fn from_circuit(n_qubits: usize, gates: &[Gate]) -> Self {
        let mut t = Self::identity(n_qubits);
        for &g in gates {
            t.apply_gate(g);
        }
        t
    }

    /// Appends a gate after the current Clifford.
    pub fn apply_gate(&mut self, gate: Gate) {
        for r in &mut self.rows {
            conjugate_by_gate(r, gate);
        }
    }

    /// `C P C†` for an arbitrary Pauli string.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: p.n_qubits(),
            });
        }
        let n = self.n_qubits;
        let key = p.key();
        let extra = (key.x & key.z).count_ones();
        let mut out = PauliString::identity(n).with_phase(((p.phase_exp() as u32 + extra) & 3) as u8);
        for q in 0..n {
            if key.x & qubit_bit(n, q) != 0 {
                out = out.mul(&self.rows[q])?;
            }
        }
        for q in 0..n {
            if key.z & qubit_bit(n, q) != 0 {
                out = out.mul(&self.rows[n + q])?;
            }
        }
        Ok(out)
    }

    /// Tableau of `other · self` (first `self`, then `other`).
    pub fn then(&self, other: &CliffordTableau) -> Result<CliffordTableau> {
        let rows = self
            .rows
            .iter()
            .map(|r| other.conjugate(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(CliffordTableau {
            n_qubits: self.n_qubits,
            rows,
        })
    }

    /// Gate sequence, in application order, realizing this tableau up to global phase.
    pub fn synthesize(&self) -> Result<Vec<Gate>> {
        self.validate()?;
        let n = self.n_qubits;
        let mut work = self.clone();
        let mut reducers: Vec<Gate> = Vec::new();
        let mut push = |work: &mut CliffordTableau, g: Gate| {
            work.apply_gate(g);
            reducers.push(g);
        };
        for q in 0..n {
            // X image of q → X_q
            for k in q..n {
                match work.rows[q].get(k) {
                    crate::pauli::Pauli::Z => push(&mut work, Gate::H(k)),
                    crate::pauli::Pauli::Y => push(&mut work, Gate::S(k)),
                    _ => {}
                }
            }
            if work.rows[q].get(q) == crate::pauli::Pauli::I {
                let k = (q + 1..n)
                    .find(|&k| work.rows[q].get(k) != crate::pauli::Pauli::I)
                    .ok_or_else(|| Error::InvalidTableau("X image is the identity".into()))?;
                push(&mut work, Gate::Cnot(k, q));
            }
            for k in q + 1..n {
                if work.rows[q].get(k) != crate::pauli::Pauli::I {
                    push(&mut work, Gate::Cnot(q, k));
                }
            }
            // Z image of q → Z_q while keeping X_q
            let zr = n + q;
            if work.rows[zr].get(q) == crate::pauli::Pauli::Y {
                push(&mut work, Gate::H(q));
                push(&mut work, Gate::S(q));
                push(&mut work, Gate::H(q));
            }
            for k in q + 1..n {
                match work.rows[zr].get(k) {
                    crate::pauli::Pauli::X => push(&mut work, Gate::H(k)),
                    crate::pauli::Pauli::Y => {
                        push(&mut work, Gate::S(k));
                        push(&mut work, Gate::H(k));
                    }
                    _ => {}
                }
            }
            for k in q + 1..n {
                if work.rows[zr].get(k) != crate::pauli::Pauli::I {
                    push(&mut work, Gate::Cnot(k, q));
                }
            }
            if work.rows[q].phase_exp() == 2 {
                push(&mut work, Gate::Z(q));
            }
            if work.rows[zr].phase_exp() == 2 {
                push(&mut work, Gate::X(q));
            }
        }
        if work != CliffordTableau::identity(n) {
            return Err(Error::InvalidTableau("reduction did not reach the identity".into()));
        }
        Ok(reducers.iter().rev().flat_map(|g| g.inverse()).collect())
    }

    /// Applies the synthesized circuit to `psi`.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch {
                left: self.n_qubits,
                right: psi.n_qubits(),
            });
        }
        let mut out = psi.clone();
        apply_circuit(&mut out, &self.synthesize()?);
        Ok(out)
    }

    /// Uniformly random element of the Clifford group modulo phase.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        assert!((1..=32).contains(&n_qubits), "unsupported qubit count");
        let mask = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        let form = |a: PauliKey, b: PauliKey| a.anticommutes(&b);
        let mut es: Vec<PauliKey> = Vec::with_capacity(n_qubits);
        let mut fs: Vec<PauliKey> = Vec::with_capacity(n_qubits);
        let project = |v: PauliKey, es: &[PauliKey], fs: &[PauliKey]| {
            let mut out = v;
            for (e, f) in es.iter().zip(fs) {
                if form(v, *f) {
                    out = PauliKey::new(out.x ^ e.x, out.z ^ e.z);
                }
                if form(v, *e) {
                    out = PauliKey::new(out.x ^ f.x, out.z ^ f.z);
                }
            }
            out
        };
        for _ in 0..n_qubits {
            let e = loop {
                let v = PauliKey::new(rng.random::<u64>() & mask, rng.random::<u64>() & mask);
                let p = project(v, &es, &fs);
                if !p.is_identity() {
                    break p;
                }
            };
            let f = loop {
                let v = PauliKey::new(rng.random::<u64>() & mask, rng.random::<u64>() & mask);
                let p = project(v, &es, &fs);
                if form(e, p) {
                    break p;
                }
            };
            es.push(e);
            fs.push(f);
        }
        let rows = es
            .into_iter()
            .chain(fs)
            .map(|k| PauliString::from_key(n_qubits, k, if rng.random::<bool>() { 2 } else { 0 }))
            .collect();
        CliffordTableau { n_qubits, rows }
    }

    /// Dense unitary (up to global phase) built by running the circuit on basis states.
    pub fn to_unitary(&self, limit: usize) -> Result<crate::pauli::DenseMatrix> {
        if self.n_qubits > limit {
            return Err(Error::DenseLimit {
                what: "Clifford unitary",
                n_qubits: self.n_qubits,
                limit,
            });
        }
        let circuit = self.synthesize()?;
        let d = 1usize << self.n_qubits;
        let mut m = crate::pauli::DenseMatrix::zeros(d, d);
        for col in 0..d {
            let mut s = StateVector::basis(self.n_qubits, col);
            apply_circuit(&mut s, &circuit);
            for (row, a) in s.amplitudes().iter().enumerate() {
                m[(row, col)] = *a;
            }
        }
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        let n = self.n_qubits;
        let doc = TableauJson {
            n_qubits: n,
            rows: self
                .rows
                .iter()
                .map(|r| {
                    let bits = |m: u64| -> String {
                        (0..n)
                            .map(|q| if m & qubit_bit(n, q) != 0 { '1' } else { '0' })
                            .collect()
                    };
                    format!("{}{}", bits(r.x_mask()), bits(r.z_mask()))
                })
                .collect(),
            signs: self.signs().into_iter().map(u8::from).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TableauJson = serde_json::from_str(s)?;
        let n = doc.n_qubits;
        if n == 0 || n > MAX_QUBITS || doc.signs.len() != doc.rows.len() {
            return Err(Error::Parse("malformed tableau document".into()));
        }
        let mut rows = Vec::with_capacity(doc.rows.len());
        for (bits, sign) in doc.rows.iter().zip(&doc.signs) {
            if bits.len() != 2 * n || !bits.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse(format!("bad tableau row {bits:?}")));
            }
            let mut key = PauliKey::default();
            for (i, ch) in bits.chars().enumerate() {
                if ch == '1' {
                    let b = qubit_bit(n, i % n);
                    if i < n {
                        key.x |= b;
                    } else {
                        key.z |= b;
                    }
                }
            }
            rows.push(PauliString::from_key(n, key, if *sign != 0 { 2 } else { 0 }));
        }
        Self::from_rows(n, rows)
    }

    fn canonical_key(&self) -> Vec<(u64, u64, u8)> {
        self.rows
            .iter()
            .map(|r| (r.x_mask(), r.z_mask(), r.phase_exp()))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TableauJson {
    n_qubits: usize,
    rows: Vec<String>,
    signs: Vec<u8>,
}

/// Runs a gate list on a statevector.
pub fn apply_circuit(psi: &mut StateVector, gates: &[Gate]) {
    let n = psi.n_qubits();
    for &g in gates {
        match g {
            Gate::H(q) => psi.apply_h(q),
            Gate::S(q) => psi.apply_phase_on_bits(qubit_bit(n, q) as usize, Complex64::new(0.0, 1.0)),
            Gate::Z(q) => psi.apply_phase_on_bits(qubit_bit(n, q) as usize, Complex64::new(-1.0, 0.0)),
            Gate::X(q) => psi.apply_x(q),
            Gate::Cnot(c, t) => psi.apply_cnot(c, t),
        }
    }
}

/// Breadth-first closure of the generators `H_q`, `S_q`, `CNOT(a, b)`.
///
/// Fails with [`Error::TermBudget`] once more than `budget` elements are found.
pub fn enumerate_cliffords(n_qubits: usize, budget: usize) -> Result<Vec<CliffordTableau>> {
    let mut gens = Vec::new();
    for q in 0..n_qubits {
        gens.push(Gate::H(q));
        gens.push(Gate::S(q));
        for t in 0..n_qubits {
            if t != q {
                gens.push(Gate::Cnot(q, t));
            }
        }
    }
    let start = CliffordTableau::identity(n_qubits);
    let mut seen: HashMap<Vec<(u64, u64, u8)>, usize> = HashMap::new();
    let mut out = vec![start.clone()];
    seen.insert(start.canonical_key(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for &g in &gens {
            let mut next = out[i].clone();
            next.apply_gate(g);
            let key = next.canonical_key();
            if let std::collections::hash_map::Entry::Vacant(slot) = seen.entry(key) {
                if out.len() >= budget {
                    return Err(Error::TermBudget {
                        terms: out.len() + 1,
                        budget,
                    });
                }
                slot.insert(out.len());
                out.push(next);
                queue.push_back(out.len() - 1);
            }
        }
    }
    Ok(out)
}

/// The 24 single-qubit Cliffords with their 2×2 unitaries.
pub fn enumerate_1q_cliffords() -> Vec<(CliffordTableau, Gate1)> {
    enumerate_cliffords(1, 24)
        .expect("single-qubit group has 24 elements")
        .into_iter()
        .map(|t| {
            let u = t.to_unitary(1).expect("one qubit");
            let g = Gate1::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
            (t, g)
        })
        .collect()
}

/// `n` independent uniform draws from the single-qubit Clifford group, as indices into `table`.
pub fn sample_local_cliffords<R: Rng + ?Sized>(
    n: usize,
    table: &[(CliffordTableau, Gate1)],
    rng: &mut R,
) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..table.len())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{DenseMatrix, PauliOperator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gate_unitary(n: usize, g: Gate) -> DenseMatrix {
        let d = 1 << n;
        let mut m = DenseMatrix::zeros(d, d);
        for col in 0..d {
            let mut s = StateVector::basis(n, col);
            apply_circuit(&mut s, &[g]);
            for (r, a) in s.amplitudes().iter().enumerate() {
                m[(r, col)] = *a;
            }
        }
        m
    }

    #[test]
    fn gate_rules_match_dense_conjugation() {
        let n = 2;
        let gates = [
            Gate::H(0),
            Gate::H(1),
            Gate::S(0),
            Gate::S(1),
            Gate::X(1),
            Gate::Z(0),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 0),
        ];
        for g in gates {
            let u = gate_unitary(n, g);
            for x in 0..4u64 {
                for z in 0..4u64 {
                    for ph in [0u8, 2] {
                        let p = PauliString::new(n, x, z, ph).unwrap();
                        let mut q = p;
                        conjugate_by_gate(&mut q, g);
                        let lhs = &u * p.to_dense(4).unwrap() * u.adjoint();
                        let rhs = q.to_dense(4).unwrap();
                        assert!((lhs - rhs).iter().all(|v| v.norm() < 1e-12), "{g:?} on {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn identity_synthesizes_to_identity_action() {
        let t = CliffordTableau::identity(3);
        let circ = t.synthesize().unwrap();
        assert_eq!(CliffordTableau::from_circuit(3, &circ), t);
    }

    #[test]
    fn hadamard_tableau() {
        let t = CliffordTableau::from_circuit(2, &[Gate::H(0)]);
        assert_eq!(t.x_image(0).to_string(), "+ZI");
        assert_eq!(t.z_image(0).to_string(), "+XI");
        let circ = t.synthesize().unwrap();
        assert_eq!(CliffordTableau::from_circuit(2, &circ), t);
    }

    #[test]
    fn random_tableaux_are_valid_and_synthesize() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..30 {
                let t = CliffordTableau::random(n, &mut rng);
                t.validate().unwrap();
                let circ = t.synthesize().unwrap();
                assert_eq!(CliffordTableau::from_circuit(n, &circ), t);
            }
        }
    }

    #[test]
    fn conjugate_matches_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = CliffordTableau::random(3, &mut rng);
        let u = t.to_unitary(6).unwrap();
        for label in ["XYZ", "IZI", "YYX", "-iZXI"] {
            let p: PauliString = label.parse().unwrap();
            let lhs = &u * p.to_dense(6).unwrap() * u.adjoint();
            let rhs = PauliOperator::from_string(t.conjugate(&p).unwrap()).to_dense(6).unwrap();
            assert!((lhs - rhs).iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = CliffordTableau::random(2, &mut rng);
        let b = CliffordTableau::random(2, &mut rng);
        let ab = a.then(&b).unwrap();
        let mut circ = a.synthesize().unwrap();
        circ.extend(b.synthesize().unwrap());
        assert_eq!(CliffordTableau::from_circuit(2, &circ), ab);
    }

    #[test]
    fn group_orders() {
        assert_eq!(enumerate_1q_cliffords().len(), 24);
        assert_eq!(enumerate_cliffords(2, 20000).unwrap().len(), 11520);
        assert!(matches!(
            enumerate_cliffords(2, 100),
            Err(Error::TermBudget { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let t = CliffordTableau::random(3, &mut rng);
        assert_eq!(CliffordTableau::from_json(&t.to_json().unwrap()).unwrap(), t);
    }

    #[test]
    fn invalid_rows_rejected() {
        let x: PauliString = "X".parse().unwrap();
        assert!(CliffordTableau::from_rows(1, vec![x, x]).is_err());
    }
}
