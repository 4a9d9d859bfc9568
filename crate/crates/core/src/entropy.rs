//! Spectra and von Neumann entropies of Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as a failed positivity check.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyUnits {
    #[default]
    Nats,
    Bits,
}

impl EntropyUnits {
    /// Converts a value in nats.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            EntropyUnits::Nats => nats,
            EntropyUnits::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

/// `-sum lambda ln lambda` with `0 ln 0 = 0`; eigenvalues are clipped to
/// `[0, 1]` first.
pub fn entropy_from_eigenvalues<I: IntoIterator<Item = f64>>(eigenvalues: I) -> f64 {
    eigenvalues.into_iter().map(|l| l.clamp(0.0, 1.0)).filter(|&l| l > 0.0).map(|l| -l * l.ln()).sum()
}

/// Ascending eigenvalues of a Hermitian matrix (the lower triangle is
/// symmetrized first).
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::from(0.5);
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Von Neumann entropy (nats) of a density matrix of any dimension.
pub fn vn_entropy(rho: &DMatrix<Complex64>) -> Result<f64> {
    if !rho.is_square() {
        return Err(Error::InvalidDensity("matrix is not square".into()));
    }
    let spectrum = hermitian_spectrum(rho);
    if let Some(&low) = spectrum.first() {
        if low < -PSD_TOL {
            return Err(Error::NotPositive(low));
        }
    }
    Ok(entropy_from_eigenvalues(spectrum))
}
