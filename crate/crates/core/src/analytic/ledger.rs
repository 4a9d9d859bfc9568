use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{fragment_kernel, DensityMatrix2, Fragment, ModelParams, SystemAmplitudes};
use crate::ops::{self, Mat2};

/// Gram norm tolerance for the `normalized` flag.
pub const LEDGER_NORM_TOL: f64 = 1e-10;
/// Renormalizing a ledger whose norm is below this fails.
pub const ANNIHILATION_THRESHOLD: f64 = 1e-14;
/// Relative tolerance for merging branch times.
pub const MERGE_TOL: f64 = 1e-12;

/// One term `a |z> (x) prod_j exp(i g_j q_j theta / 2) |chi_j>` of the
/// global state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub label: usize,
    pub amplitude: Complex64,
    pub theta: f64,
}

/// Sign with which a pointer branch accumulates interaction time.
pub fn branch_sign(label: usize) -> f64 {
    if label == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Exact global state as a list of branches.
///
/// Branches are kept in canonical order (label, then theta) and branches
/// with equal label and theta are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchLedger {
    branches: Vec<Branch>,
    params: Arc<ModelParams>,
    normalized: bool,
}

impl BranchLedger {
    /// The product state `(alpha|0> + beta|1>) (x) prod_j |chi_j>`.
    pub fn initial(sys: &SystemAmplitudes, params: Arc<ModelParams>) -> Self {
        let branches = (0..2).map(|z| Branch { label: z, amplitude: sys.amplitude(z), theta: 0.0 }).collect();
        Self { branches: canonicalize(branches), params, normalized: true }
    }

    /// Builds a ledger from raw branches. The result is flagged normalized
    /// only if its Gram norm is one.
    pub fn from_branches(branches: Vec<Branch>, params: Arc<ModelParams>) -> Result<Self> {
        for b in &branches {
            if b.label > 1 {
                return Err(Error::InvalidHistory(format!("pointer label {}", b.label)));
            }
            if !(b.theta.is_finite() && b.amplitude.re.is_finite() && b.amplitude.im.is_finite()) {
                return Err(Error::NonFinite("branch".into()));
            }
        }
        let mut ledger = Self { branches: canonicalize(branches), params, normalized: false };
        ledger.normalized = (ledger.gram_norm() - 1.0).abs() <= LEDGER_NORM_TOL;
        Ok(ledger)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn params(&self) -> &Arc<ModelParams> {
        &self.params
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Number of branches carrying each pointer label.
    pub fn label_counts(&self) -> [usize; 2] {
        let mut counts = [0, 0];
        for b in &self.branches {
            counts[b.label] += 1;
        }
        counts
    }

    /// Unitary evolution for a time `dt >= 0`.
    pub fn evolve(&self, dt: f64) -> Result<Self> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(Error::NegativeTime(dt));
        }
        let branches =
            self.branches.iter().map(|b| Branch { theta: b.theta + branch_sign(b.label) * dt, ..*b }).collect();
        Ok(Self { branches: canonicalize(branches), params: self.params.clone(), normalized: self.normalized })
    }

    /// Applies `m (x) 1_E`. With `renormalize`, the result is divided by
    /// the square root of its Gram norm.
    pub fn apply_operator(&self, m: &Mat2, renormalize: bool) -> Result<Self> {
        if !ops::is_finite(m) {
            return Err(Error::NonFinite("operator".into()));
        }
        let mut branches = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            for zp in 0..2 {
                let amplitude = m[(zp, b.label)] * b.amplitude;
                branches.push(Branch { label: zp, amplitude, theta: b.theta });
            }
        }
        let mut out = Self {
            branches: canonicalize(branches),
            params: self.params.clone(),
            normalized: self.normalized && ops::is_unitary(m, 1e-12),
        };
        if renormalize {
            out = out.renormalized()?;
        }
        Ok(out)
    }

    pub fn renormalized(&self) -> Result<Self> {
        let norm = self.gram_norm();
        if !(norm >= ANNIHILATION_THRESHOLD) {
            return Err(Error::AnnihilatedState(norm));
        }
        let scale = norm.sqrt().recip();
        let branches = self.branches.iter().map(|b| Branch { amplitude: b.amplitude * scale, ..*b }).collect();
        Ok(Self { branches, params: self.params.clone(), normalized: true })
    }

    /// `<Psi|Psi>`.
    pub fn gram_norm(&self) -> f64 {
        overlap_unchecked(self, self).re
    }

    /// Reduced system state of a normalized ledger.
    pub fn reduced_density(&self) -> Result<DensityMatrix2> {
        if !self.normalized {
            return Err(Error::UnnormalizedLedger);
        }
        Ok(DensityMatrix2::from_matrix_unchecked(self.reduced_matrix()))
    }

    /// `tr_E |Psi><Psi|` without any normalization requirement.
    pub fn reduced_matrix(&self) -> Mat2 {
        let mut rho = Mat2::zeros();
        for k in &self.branches {
            for l in &self.branches {
                let env = self.params.kernel(0.5 * (k.theta - l.theta));
                rho[(k.label, l.label)] += k.amplitude * l.amplitude.conj() * env;
            }
        }
        rho
    }

    /// Nonzero spectrum of the reduced state on the system (if `system`)
    /// together with the environment particles in `frag`.
    pub fn part_spectrum(&self, system: bool, frag: &Fragment) -> Result<Vec<f64>> {
        frag.validate(&self.params)?;
        let rest = frag.complement(&self.params);
        let k = self.branches.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let kept_gram = DMatrix::from_fn(k, k, |i, j| {
            let (bi, bj) = (&self.branches[i], &self.branches[j]);
            if system && bi.label != bj.label {
                return Complex64::from(0.0);
            }
            fragment_kernel(&self.params, frag, 0.5 * (bj.theta - bi.theta))
        });
        let coefficients = DMatrix::from_fn(k, k, |i, j| {
            let (bi, bj) = (&self.branches[i], &self.branches[j]);
            if !system && bi.label != bj.label {
                return Complex64::from(0.0);
            }
            bi.amplitude * bj.amplitude.conj() * fragment_kernel(&self.params, &rest, 0.5 * (bi.theta - bj.theta))
        });
        let root = hermitian_sqrt(&kept_gram);
        let reduced = &root * coefficients * &root;
        let trace: f64 = reduced.diagonal().iter().map(|c| c.re).sum();
        if !(trace > 0.0) {
            return Err(Error::AnnihilatedState(trace));
        }
        Ok(crate::entropy::hermitian_spectrum(&reduced).into_iter().map(|l| l / trace).collect())
    }

    /// Von Neumann entropy (nats) of the part selected as in
    /// [`BranchLedger::part_spectrum`].
    pub fn part_entropy(&self, system: bool, frag: &Fragment) -> Result<f64> {
        let spectrum = self.part_spectrum(system, frag)?;
        if let Some(&low) = spectrum.first() {
            if low < -crate::entropy::PSD_TOL {
                return Err(Error::NotPositive(low));
            }
        }
        Ok(crate::entropy::entropy_from_eigenvalues(spectrum))
    }

    /// `I(S:F) = S(S) + S(F) - S(SF)` in nats.
    pub fn mutual_information(&self, frag: &Fragment) -> Result<f64> {
        let s = self.part_entropy(true, &Fragment::empty())?;
        let f = self.part_entropy(false, frag)?;
        let sf = self.part_entropy(true, frag)?;
        Ok(s + f - sf)
    }
}

/// `<A|B>`; ledgers need not be normalized.
pub fn global_overlap(a: &BranchLedger, b: &BranchLedger) -> Result<Complex64> {
    if !(Arc::ptr_eq(&a.params, &b.params) || a.params == b.params) {
        return Err(Error::ParamsMismatch);
    }
    Ok(overlap_unchecked(a, b))
}

fn overlap_unchecked(a: &BranchLedger, b: &BranchLedger) -> Complex64 {
    let mut sum = Complex64::from(0.0);
    for k in &a.branches {
        for l in b.branches.iter().filter(|l| l.label == k.label) {
            sum += k.amplitude.conj() * l.amplitude * a.params.kernel(0.5 * (l.theta - k.theta));
        }
    }
    sum
}

fn same_theta(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0)
}

fn canonicalize(mut branches: Vec<Branch>) -> Vec<Branch> {
    branches.sort_by(|x, y| x.label.cmp(&y.label).then(x.theta.total_cmp(&y.theta)));
    let mut merged: Vec<Branch> = Vec::with_capacity(branches.len());
    for b in branches {
        match merged.last_mut() {
            Some(last) if last.label == b.label && same_theta(last.theta, b.theta) => {
                last.amplitude += b.amplitude;
            }
            _ => merged.push(b),
        }
    }
    merged.retain(|b| b.amplitude != Complex64::from(0.0));
    merged
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let sym = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from(l.max(0.0).sqrt())));
    v * roots * v.adjoint()
}
