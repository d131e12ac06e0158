//! Bit-mask Pauli algebra.
//!
//! A Pauli word on `n` qubits is stored as a pair of masks `(x, z)`. Qubit `q`
//! lives at bit `n - 1 - q`, the same position it occupies in a statevector
//! amplitude index, so qubit 0 is the most significant bit. The unsigned word
//! `σ(x, z)` is the Hermitian tensor product of `I, X, Y, Z` letters (a qubit
//! with both bits set is `Y`, not `XZ`). A [`PauliString`] carries an extra
//! power of `i`; a [`PauliOperator`] stores unsigned words with the phase folded
//! into a complex coefficient.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with smaller magnitude are dropped after arithmetic.
pub const DEFAULT_PRUNE_TOL: f64 = 1e-14;
/// Largest qubit count for which dense matrices are built.
pub const DEFAULT_DENSE_LIMIT: usize = 12;
pub const MAX_QUBITS: usize = 63;

pub type DenseMatrix = DMatrix<Complex64>;

/// `i^k`.
#[inline]
pub fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[inline]
pub(crate) fn qubit_bit(n_qubits: usize, qubit: usize) -> u64 {
    1u64 << (n_qubits - 1 - qubit)
}

#[inline]
fn full_mask(n_qubits: usize) -> u64 {
    if n_qubits >= 64 {
        u64::MAX
    } else {
        (1u64 << n_qubits) - 1
    }
}

fn check_qubits(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::QubitMismatch { left, right });
    }
    Ok(())
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Unsigned Pauli word, used as the canonical key of operator term maps.
///
/// Ordering is lexicographic in `(x, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliKey {
    pub x: u64,
    pub z: u64,
}

impl PauliKey {
    pub const IDENTITY: PauliKey = PauliKey { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliKey { x, z }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Parity of the symplectic form.
    #[inline]
    pub fn anticommutes(&self, other: &PauliKey) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 1
    }

    #[inline]
    pub fn commutes(&self, other: &PauliKey) -> bool {
        !self.anticommutes(other)
    }

    /// `σ(self) σ(other) = i^k σ(self ⊕ other)`; returns `(k, self ⊕ other)`.
    #[inline]
    pub fn mul(&self, other: &PauliKey) -> (u32, PauliKey) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 3 * (x & z).count_ones();
        (k & 3, PauliKey { x, z })
    }

    /// Phase `φ(c)` with `σ|c⟩ = φ(c)|c ⊕ x⟩`.
    #[inline]
    pub(crate) fn column_phase(&self, col: u64) -> Complex64 {
        let k = (self.x & self.z).count_ones() + 2 * (self.z & col).count_ones();
        i_pow(k)
    }
}

/// A Pauli word with a tracked power-of-`i` prefactor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    key: PauliKey,
    phase: u8,
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mask = full_mask(n_qubits);
        if x_mask & !mask != 0 || z_mask & !mask != 0 {
            return Err(Error::MaskOutOfRange { n_qubits });
        }
        Ok(PauliString {
            n_qubits,
            key: PauliKey::new(x_mask, z_mask),
            phase: phase_exp & 3,
        })
    }

    pub(crate) fn from_key(n_qubits: usize, key: PauliKey, phase: u8) -> Self {
        PauliString {
            n_qubits,
            key,
            phase: phase & 3,
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString::from_key(n_qubits, PauliKey::IDENTITY, 0)
    }

    /// Word with the given letters on the listed qubits and identity elsewhere.
    pub fn on_sites(n_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = PauliString::identity(n_qubits);
        for &(q, p) in sites {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
            s.set(q, p);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    pub fn x_mask(&self) -> u64 {
        self.key.x
    }
    pub fn z_mask(&self) -> u64 {
        self.key.z
    }
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }
    pub fn key(&self) -> PauliKey {
        self.key
    }

    pub fn with_phase(mut self, phase_exp: u8) -> Self {
        self.phase = phase_exp & 3;
        self
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let b = qubit_bit(self.n_qubits, qubit);
        Pauli::from_bits(self.key.x & b != 0, self.key.z & b != 0)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let b = qubit_bit(self.n_qubits, qubit);
        let (x, z) = p.bits();
        self.key.x = if x { self.key.x | b } else { self.key.x & !b };
        self.key.z = if z { self.key.z | b } else { self.key.z & !b };
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.key.is_identity() && self.phase == 0
    }

    pub fn weight(&self) -> usize {
        self.key.weight() as usize
    }

    pub fn coefficient(&self) -> Complex64 {
        i_pow(self.phase as u32)
    }

    /// Product `self · other` with exact phase.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let (k, key) = self.key.mul(&other.key);
        Ok(PauliString::from_key(
            self.n_qubits,
            key,
            ((self.phase as u32 + other.phase as u32 + k) & 3) as u8,
        ))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        Ok(self.key.commutes(&other.key))
    }

    pub fn support(&self) -> Vec<usize> {
        mask_to_qubits(self.n_qubits, self.key.x | self.key.z)
    }

    pub fn to_dense(&self, limit: usize) -> Result<DenseMatrix> {
        PauliOperator::from_string(*self).to_dense(limit)
    }
}

pub(crate) fn mask_to_qubits(n_qubits: usize, mask: u64) -> Vec<usize> {
    (0..n_qubits)
        .filter(|&q| mask & qubit_bit(n_qubits, q) != 0)
        .collect()
}


impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.phase >= 2 { '-' } else { '+' };
        write!(f, "{sign}")?;
        if self.phase & 1 == 1 {
            write!(f, "i")?;
        }
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let letters = rest.trim();
        if letters.is_empty() {
            return Err(Error::Parse(format!("empty Pauli word in {s:?}")));
        }
        let n = letters.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Parse(format!("Pauli word longer than {MAX_QUBITS}")));
        }
        let mut out = PauliString::identity(n);
        for (q, c) in letters.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("bad Pauli letter {other:?}"))),
            };
            out.set(q, p);
        }
        out.phase = (if neg { 2 } else { 0 }) + u8::from(imag);
        Ok(out)
    }
}

/// Sparse operator `Σ c_P σ_P` over unsigned Pauli words.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliKey, Complex64>,
}

impl PauliOperator {
    pub fn zero(n_qubits: usize) -> Self {
        PauliOperator {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::scaled_identity(n_qubits, Complex64::new(1.0, 0.0))
    }

    pub fn scaled_identity(n_qubits: usize, c: Complex64) -> Self {
        let mut op = Self::zero(n_qubits);
        op.add_term(PauliKey::IDENTITY, c);
        op
    }

    pub fn from_string(s: PauliString) -> Self {
        let mut op = Self::zero(s.n_qubits);
        op.add_term(s.key, s.coefficient());
        op
    }

    /// Builds `Σ c · s` from signed strings, folding each phase into its coefficient.
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, Complex64)>,
    {
        let mut op = Self::zero(n_qubits);
        for (s, c) in terms {
            check_qubits(n_qubits, s.n_qubits)?;
            op.add_term(s.key, c * s.coefficient());
        }
        op.prune(DEFAULT_PRUNE_TOL);
        Ok(op)
    }

    /// Single real-weighted term from a label such as `"XZI"`.
    pub fn term(label: &str, coeff: f64) -> Result<Self> {
        let s: PauliString = label.parse()?;
        let n = s.n_qubits;
        Self::from_terms(n, [(s, Complex64::new(coeff, 0.0))])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliKey, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &PauliKey) -> Complex64 {
        self.terms.get(key).copied().unwrap_or_default()
    }

    /// `Tr(A)/d`.
    pub fn normalized_trace(&self) -> Complex64 {
        self.coefficient(&PauliKey::IDENTITY)
    }

    pub(crate) fn add_term(&mut self, key: PauliKey, c: Complex64) {
        *self.terms.entry(key).or_default() += c;
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() >= tol);
    }

    pub fn add(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, *c);
        }
        out.prune(DEFAULT_PRUNE_TOL);
        Ok(out)
    }

    pub fn sub(&self, other: &PauliOperator) -> Result<PauliOperator> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> PauliOperator {
        let mut out = PauliOperator {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        };
        out.prune(DEFAULT_PRUNE_TOL);
        out
    }

    pub fn scale_real(&self, c: f64) -> PauliOperator {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let mut acc: std::collections::HashMap<PauliKey, Complex64> =
            std::collections::HashMap::with_capacity(self.len() * other.len());
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let (k, key) = ka.mul(kb);
                *acc.entry(key).or_default() += ca * cb * i_pow(k);
            }
        }
        let mut out = PauliOperator {
            n_qubits: self.n_qubits,
            terms: acc.into_iter().collect(),
        };
        out.prune(DEFAULT_PRUNE_TOL);
        Ok(out)
    }

    /// `AB − BA`. Only anticommuting pairs of words contribute, each with `2·σ_a σ_b`.
    pub fn commutator(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let mut out = PauliOperator::zero(self.n_qubits);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if ka.anticommutes(kb) {
                    let (k, key) = ka.mul(kb);
                    out.add_term(key, ca * cb * i_pow(k) * 2.0);
                }
            }
        }
        out.prune(DEFAULT_PRUNE_TOL);
        Ok(out)
    }

    pub fn dagger(&self) -> PauliOperator {
        PauliOperator {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect(),
        }
    }

    /// `Σ |c_P|²`, which equals `Tr(A†A)/d`.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Every coefficient replaced by its magnitude.
    pub fn abs_envelope(&self) -> PauliOperator {
        PauliOperator {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, Complex64::new(c.norm(), 0.0)))
                .collect(),
        }
    }

    /// `Tr(AB)/d = Σ_P a_P b_P`.
    pub fn trace_product(&self, other: &PauliOperator) -> Result<Complex64> {
        check_qubits(self.n_qubits, other.n_qubits)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small
            .terms
            .iter()
            .filter_map(|(k, c)| large.terms.get(k).map(|d| c * d))
            .sum())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Operator without its identity component.
    pub fn traceless_part(&self) -> PauliOperator {
        let mut out = self.clone();
        out.terms.remove(&PauliKey::IDENTITY);
        out
    }

    pub fn support_mask(&self) -> u64 {
        self.terms.keys().fold(0, |m, k| m | k.x | k.z)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        mask_to_qubits(self.n_qubits, self.support_mask())
            .into_iter()
            .collect()
    }

    pub fn to_dense(&self, limit: usize) -> Result<DenseMatrix> {
        if self.n_qubits > limit {
            return Err(Error::DenseLimit {
                what: "dense operator",
                n_qubits: self.n_qubits,
                limit,
            });
        }
        let d = 1usize << self.n_qubits;
        let mut m = DenseMatrix::zeros(d, d);
        for (key, c) in &self.terms {
            for col in 0..d as u64 {
                let row = (col ^ key.x) as usize;
                m[(row, col as usize)] += c * key.column_phase(col);
            }
        }
        Ok(m)
    }

    /// Pauli decomposition `c_P = Tr(σ_P M)/d` of a dense matrix.
    pub fn from_dense(m: &DenseMatrix) -> Result<PauliOperator> {
        let d = m.nrows();
        if d != m.ncols() || !d.is_power_of_two() || d < 2 {
            return Err(Error::InvalidArgument(format!(
                "matrix of shape {}x{} is not a qubit operator",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = d.trailing_zeros() as usize;
        let mut op = PauliOperator::zero(n);
        let mut w = vec![Complex64::default(); d];
        for x in 0..d as u64 {
            // Tr(σ M) = Σ_c φ(c) M[c, c⊕x]; the z-dependence is a Walsh–Hadamard transform.
            for (c, slot) in w.iter_mut().enumerate() {
                *slot = m[(c, c ^ x as usize)];
            }
            walsh_hadamard(&mut w);
            for (z, v) in w.iter().enumerate() {
                let key = PauliKey::new(x, z as u64);
                let c = v * i_pow((x & z as u64).count_ones()) / d as f64;
                if c.norm() >= DEFAULT_PRUNE_TOL {
                    op.terms.insert(key, c);
                }
            }
        }
        Ok(op)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<PauliOperator> {
        Ok(serde_json::from_str(s)?)
    }
}

/// In-place unnormalized Walsh–Hadamard transform: `w_z ← Σ_c (−1)^{z·c} w_c`.
pub(crate) fn walsh_hadamard(w: &mut [Complex64]) {
    let n = w.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = w[i];
                let b = w[i + h];
                w[i] = a + b;
                w[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    pauli: String,
    re: f64,
    im: f64,
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(k, c)| TermRecord {
                pauli: PauliString::from_key(self.n_qubits, *k, 0).to_string(),
                re: c.re,
                im: c.im,
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        let first = records
            .first()
            .ok_or_else(|| D::Error::custom("cannot infer qubit count from an empty term list"))?;
        let n = first
            .pauli
            .parse::<PauliString>()
            .map_err(D::Error::custom)?
            .n_qubits;
        let terms = records
            .iter()
            .map(|r| {
                r.pauli
                    .parse::<PauliString>()
                    .map(|s| (s, Complex64::new(r.re, r.im)))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        PauliOperator::from_terms(n, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;

    mod approx_eq {
        use super::*;
        pub fn mat_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
            (a - b).iter().all(|v| v.norm() < tol)
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let p = ps("X").mul(&ps("Z")).unwrap();
        assert_eq!(p.phase_exp(), 3);
        assert_eq!((p.x_mask(), p.z_mask()), (1, 1));
        assert_eq!(p.to_string(), "-iY");
    }

    #[test]
    fn hermitian_words_square_to_identity() {
        for label in ["X", "Y", "Z", "XYZ", "YYIZ"] {
            let p = ps(label);
            assert!(p.mul(&p).unwrap().is_identity());
        }
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let a = ps("ZX");
        let b = ps("XZ");
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod, ps("YY"));
        let dense = a.to_dense(4).unwrap() * b.to_dense(4).unwrap();
        assert!(mat_close(&dense, &prod.to_dense(4).unwrap(), 1e-12));
    }

    #[test]
    fn commutation_examples() {
        assert!(ps("X").commutes(&ps("X")).unwrap());
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
        let a = ps("XX").to_dense(4).unwrap();
        let b = ps("ZZ").to_dense(4).unwrap();
        assert!(mat_close(&(&a * &b), &(&b * &a), 1e-14));
        assert!(matches!(
            ps("X").commutes(&ps("XX")),
            Err(Error::QubitMismatch { .. })
        ));
    }

    #[test]
    fn operator_products() {
        let a = PauliOperator::term("XY", 0.3).unwrap();
        assert_eq!(a.mul(&PauliOperator::identity(2)).unwrap(), a);
        let xz = PauliOperator::term("X", 1.0)
            .unwrap()
            .add(&PauliOperator::term("Z", 1.0).unwrap())
            .unwrap();
        let sq = xz.mul(&xz).unwrap();
        assert_eq!(sq, PauliOperator::scaled_identity(1, c(2.0, 0.0)));
    }

    #[test]
    fn commutator_of_x_and_y() {
        let x = PauliOperator::term("X", 1.0).unwrap();
        let y = PauliOperator::term("Y", 1.0).unwrap();
        let comm = x.commutator(&y).unwrap();
        assert_eq!(comm, PauliOperator::term("Z", 1.0).unwrap().scale(c(0.0, 2.0)));
        assert!(x.commutator(&x).unwrap().is_zero());
    }

    #[test]
    fn dagger_add_scale() {
        let iz = PauliOperator::term("Z", 1.0).unwrap().scale(c(0.0, 1.0));
        assert_eq!(iz.dagger(), iz.scale_real(-1.0));
        assert!(iz.add(&iz.scale_real(-1.0)).unwrap().is_zero());
    }

    #[test]
    fn norms_and_envelope() {
        assert_eq!(PauliOperator::identity(3).frobenius_norm_sq(), 1.0);
        assert_eq!(PauliOperator::zero(3).frobenius_norm_sq(), 0.0);
        let op = PauliOperator::term("Z", 1.0)
            .unwrap()
            .scale(c(0.0, -1.0))
            .add(&PauliOperator::term("X", 2.0).unwrap())
            .unwrap();
        let env = op.abs_envelope();
        assert_eq!(env.coefficient(&ps("Z").key()), c(1.0, 0.0));
        assert_eq!(env.coefficient(&ps("X").key()), c(2.0, 0.0));
        assert_eq!(env.abs_envelope(), env);
    }

    #[test]
    fn support_sets() {
        assert!(PauliOperator::identity(3).support().is_empty());
        assert_eq!(ps("ZXI").support(), vec![0, 1]);
    }

    #[test]
    fn dense_basics() {
        let id = PauliOperator::identity(2).to_dense(12).unwrap();
        assert!(mat_close(&id, &DenseMatrix::identity(4, 4), 0.0 + 1e-15));
        let x = PauliOperator::term("X", 1.0).unwrap().to_dense(12).unwrap();
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));
        assert!(matches!(
            PauliOperator::identity(13).to_dense(12),
            Err(Error::DenseLimit { .. })
        ));
        // qubit 0 is the most significant index bit
        let zi = PauliOperator::term("ZI", 1.0).unwrap().to_dense(12).unwrap();
        assert_eq!(zi[(2, 2)], c(-1.0, 0.0));
        assert_eq!(zi[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn dense_round_trip() {
        let op = PauliOperator::from_terms(
            2,
            [
                (ps("XY"), c(0.5, -0.25)),
                (ps("ZI"), c(1.0, 0.0)),
                (ps("IY"), c(0.0, 0.7)),
            ],
        )
        .unwrap();
        let back = PauliOperator::from_dense(&op.to_dense(12).unwrap()).unwrap();
        assert!(back.sub(&op).unwrap().frobenius_norm_sq() < 1e-24);
    }

    #[test]
    fn text_round_trip() {
        for s in ["+XYZ", "-iZZ", "+iI", "-X"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let op = PauliOperator::from_terms(3, [(ps("XIZ"), c(0.5, 1.0)), (ps("-YYY"), c(2.0, 0.0))])
            .unwrap();
        let json = op.to_json().unwrap();
        assert!(json.contains("\"pauli\":\"+XIZ\""));
        assert_eq!(PauliOperator::from_json(&json).unwrap(), op);
    }

    #[test]
    fn mask_validation() {
        assert!(matches!(
            PauliString::new(2, 0b100, 0, 0),
            Err(Error::MaskOutOfRange { .. })
        ));
    }
}
