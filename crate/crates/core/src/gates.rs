//! Standard gate matrices.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

pub type Gate1 = Matrix2<Complex64>;
pub type Gate2 = Matrix4<Complex64>;

const O: Complex64 = Complex64::new(0.0, 0.0);
const L: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Gate1 {
    Gate1::identity()
}

pub fn hadamard() -> Gate1 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Gate1::new(h, h, h, -h)
}

pub fn phase_s() -> Gate1 {
    Gate1::new(L, O, O, I)
}

pub fn t_gate() -> Gate1 {
    Gate1::new(L, O, O, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4))
}

pub fn pauli_x() -> Gate1 {
    Gate1::new(O, L, L, O)
}

pub fn pauli_y() -> Gate1 {
    Gate1::new(O, -I, I, O)
}

pub fn pauli_z() -> Gate1 {
    Gate1::new(L, O, O, -L)
}

/// CNOT with the first qubit of the pair as control.
pub fn cnot() -> Gate2 {
    let mut g = Gate2::zeros();
    g[(0, 0)] = L;
    g[(1, 1)] = L;
    g[(2, 3)] = L;
    g[(3, 2)] = L;
    g
}

/// Largest entry of `U†U − I`.
pub fn unitarity_defect<const D: usize>(
    g: &nalgebra::SMatrix<Complex64, D, D>,
) -> f64 {
    let prod = g.adjoint() * g;
    let mut worst = 0.0f64;
    for r in 0..D {
        for c in 0..D {
            let target = if r == c { L } else { O };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}
