//! Single-qubit operators in the pointer basis `{|0>, |1>}`.
//!
//! Conventions follow the model: `sigma_z = |1><1| - |0><0|`, so the
//! pointer state `|0>` is the `-1` eigenvector of `sigma_z`.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, ONE)
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

/// `|1><1| - |0><0|`.
pub fn sigma_z() -> Mat2 {
    Mat2::new(-ONE, ZERO, ZERO, ONE)
}

/// Projector `|z><z|` onto a pointer state.
pub fn pointer_projector(z: usize) -> Mat2 {
    assert!(z < 2, "pointer label must be 0 or 1");
    let mut m = Mat2::zeros();
    m[(z, z)] = ONE;
    m
}

/// `e^{-i phi sigma_y}`, the rotation used to build sieve initial states.
pub fn y_rotation(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    Mat2::new(Complex64::from(c), Complex64::from(-s), Complex64::from(s), Complex64::from(c))
}

pub fn is_finite(m: &Mat2) -> bool {
    m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    max_abs_diff(&(m.adjoint() * m), &identity()) <= tol
}

pub fn is_hermitian(m: &Mat2, tol: f64) -> bool {
    max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigenvalues of a Hermitian 2x2 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// Trace norm of a Hermitian 2x2 matrix.
pub fn trace_norm_hermitian(m: &Mat2) -> f64 {
    let [l0, l1] = hermitian_eigenvalues(m);
    l0.abs() + l1.abs()
}

/// Expectation `tr(O rho)`.
pub fn expectation(observable: &Mat2, rho: &Mat2) -> Complex64 {
    (observable * rho).trace()
}
