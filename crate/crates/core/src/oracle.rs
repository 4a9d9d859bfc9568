//! Brute-force state-vector simulator used to cross-check the exact engines.
//!
//! The Hamiltonian is diagonal in the product basis of `sigma_z` and the
//! particle positions, so a state is a flat amplitude vector over
//! `(2, d_1, ..., d_N)` (system index most significant) and evolution is a
//! pointwise phase. Dichotomic particles use their two position
//! eigenvalues `q = +1, -1`; Lorentzian particles are sampled on a uniform
//! midpoint grid.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entropy;
use crate::error::{Error, Result};
use crate::model::{Fragment, ModelParams, ParticleKind, SystemAmplitudes};
use crate::ops::{self, Mat2};

/// Largest reduced density matrix the oracle will form.
pub const MAX_REDUCTION_DIM: usize = 1 << 14;

/// Uniform midpoint grid `q_k = -Q + (k + 1/2) 2Q/d` on `[-Q, Q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    cutoff: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(cutoff: f64, points: usize) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidGrid(format!("cutoff {cutoff} must be positive")));
        }
        if points < 2 || !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("point count {points} must be even and >= 2")));
        }
        Ok(Self { cutoff, points })
    }

    /// Default resolution for a Lorentzian of scale `gamma_max`:
    /// `Q = 1e4 gamma_max`, `d = 2^18`. The truncated tail then carries
    /// about `6e-5` of the probability and the kernel error stays below
    /// `1e-4` for `|g u| <= 10`.
    pub fn default_for(gamma_max: f64) -> Self {
        Self { cutoff: 1e4 * gamma_max, points: 1 << 18 }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn positions(&self) -> Vec<f64> {
        let h = 2.0 * self.cutoff / self.points as f64;
        (0..self.points).map(|k| -self.cutoff + (k as f64 + 0.5) * h).collect()
    }
}

/// Dense global state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    dims: Vec<usize>,
    amplitudes: Vec<Complex64>,
    /// `sum_j g_j q_j` for every environment basis index.
    coupling_energy: Arc<Vec<f64>>,
}

impl OracleState {
    /// Product initial state. Lorentzian particles need `grid`.
    pub fn build_initial(sys: &SystemAmplitudes, params: &ModelParams, grid: Option<GridSpec>) -> Result<Self> {
        let mut dims = vec![2];
        let mut env_amplitudes: Vec<Complex64> = vec![Complex64::from(1.0)];
        let mut energy: Vec<f64> = vec![0.0];
        for particle in params.particles() {
            let (positions, amps) = match particle.kind() {
                ParticleKind::Dichotomic { p_plus } => {
                    (vec![1.0, -1.0], vec![Complex64::from(p_plus.sqrt()), Complex64::from((1.0 - p_plus).sqrt())])
                }
                ParticleKind::Lorentzian { gamma } => {
                    let grid = grid.ok_or(Error::GridRequired)?;
                    let q = grid.positions();
                    let raw: Vec<Complex64> = q
                        .iter()
                        .map(|&x| Complex64::from((gamma / std::f64::consts::PI).sqrt()) / Complex64::new(x, gamma))
                        .collect();
                    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                    (q, raw.into_iter().map(|a| a / norm).collect())
                }
            };
            dims.push(positions.len());
            let g = particle.coupling();
            env_amplitudes = env_amplitudes.iter().flat_map(|&a| amps.iter().map(move |&b| a * b)).collect();
            energy = energy.iter().flat_map(|&e| positions.iter().map(move |&q| e + g * q)).collect();
        }
        let amplitudes =
            [sys.alpha(), sys.beta()].iter().flat_map(|&s| env_amplitudes.iter().map(move |&e| s * e)).collect();
        Ok(Self { dims, amplitudes, coupling_energy: Arc::new(energy) })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    fn env_dim(&self) -> usize {
        self.coupling_energy.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `exp(-i H dt)`; negative `dt` is allowed here.
    pub fn propagate(&self, dt: f64) -> Self {
        let d = self.env_dim();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let z = i / d;
                let energy = 0.5 * ops::sigma_z()[(z, z)].re * self.coupling_energy[i % d];
                a * Complex64::from_polar(1.0, -energy * dt)
            })
            .collect();
        Self { amplitudes, ..self.clone() }
    }

    /// Applies `m (x) 1_E`, optionally renormalizing.
    pub fn apply_system_op(&self, m: &Mat2, renormalize: bool) -> Result<Self> {
        if !ops::is_finite(m) {
            return Err(Error::NonFinite("operator".into()));
        }
        let d = self.env_dim();
        let mut amplitudes = vec![Complex64::from(0.0); 2 * d];
        for e in 0..d {
            let (a0, a1) = (self.amplitudes[e], self.amplitudes[d + e]);
            amplitudes[e] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
            amplitudes[d + e] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
        }
        let mut out = Self { amplitudes, ..self.clone() };
        if renormalize {
            let n = out.norm_sqr();
            if !(n >= crate::analytic::ANNIHILATION_THRESHOLD) {
                return Err(Error::AnnihilatedState(n));
            }
            let s = n.sqrt().recip();
            out.amplitudes.iter_mut().for_each(|a| *a *= s);
        }
        Ok(out)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &OracleState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Reduced density matrix on the subsystems in `keep` (0 is the
    /// system, `j >= 1` is environment particle `j - 1`), in increasing
    /// subsystem order.
    pub fn reduced(&self, keep: &[usize]) -> Result<DMatrix<Complex64>> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::InvalidSubsystems("nothing kept".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::InvalidSubsystems(format!("subsystem {bad} does not exist")));
        }
        let keep_dim: usize = keep.iter().map(|&k| self.dims[k]).product();
        if keep_dim > MAX_REDUCTION_DIM {
            return Err(Error::ReductionTooLarge(keep_dim));
        }
        let total = self.amplitudes.len();
        let rest_dim = total / keep_dim;
        let mut psi = DMatrix::<Complex64>::zeros(keep_dim, rest_dim);
        for (index, &a) in self.amplitudes.iter().enumerate() {
            // split the flat index into kept and traced digits
            let (mut rem, mut kept, mut traced) = (index, 0usize, 0usize);
            let (mut kept_stride, mut traced_stride) = (1usize, 1usize);
            for (sub, &d) in self.dims.iter().enumerate().rev() {
                let digit = rem % d;
                rem /= d;
                if keep.binary_search(&sub).is_ok() {
                    kept += digit * kept_stride;
                    kept_stride *= d;
                } else {
                    traced += digit * traced_stride;
                    traced_stride *= d;
                }
            }
            psi[(kept, traced)] = a;
        }
        Ok(&psi * psi.adjoint())
    }

    /// Reduced system state as a 2x2 matrix.
    pub fn reduced_system(&self) -> Mat2 {
        let d = self.env_dim();
        let mut rho = Mat2::zeros();
        for e in 0..d {
            let a = [self.amplitudes[e], self.amplitudes[d + e]];
            for z in 0..2 {
                for zp in 0..2 {
                    rho[(z, zp)] += a[z] * a[zp].conj();
                }
            }
        }
        rho
    }

    /// `I(S:F)` in nats from explicit partial traces.
    pub fn mutual_information(&self, frag: &Fragment) -> Result<f64> {
        if frag.indices().iter().any(|&j| j + 1 >= self.dims.len()) {
            return Err(Error::InvalidSubsystems("fragment index out of range".into()));
        }
        let env: Vec<usize> = frag.indices().iter().map(|&j| j + 1).collect();
        let with_system: Vec<usize> = std::iter::once(0).chain(env.iter().copied()).collect();
        let s = vn_entropy(&self.reduced(&[0])?)?;
        let sf = vn_entropy(&self.reduced(&with_system)?)?;
        let f = if env.is_empty() { 0.0 } else { vn_entropy(&self.reduced(&env)?)? };
        Ok(s + f - sf)
    }
}

/// Von Neumann entropy in nats.
pub fn vn_entropy(rho: &DMatrix<Complex64>) -> Result<f64> {
    entropy::vn_entropy(rho)
}

pub fn mat2_to_dmatrix(m: &Mat2) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spins(n: usize) -> ModelParams {
        ModelParams::uniform_dichotomic(n, 1.0, 0.5).unwrap()
    }

    #[test]
    fn dichotomic_initial_state() {
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(1), None).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert!(s.amplitudes().iter().all(|a| (a.norm() - 0.5).abs() < 1e-15));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_needs_grid() {
        let p = ModelParams::uniform_lorentzian(1, 1.0, 1.0).unwrap();
        assert_eq!(OracleState::build_initial(&SystemAmplitudes::plus(), &p, None), Err(Error::GridRequired));
        assert!(GridSpec::new(1.0, 3).is_err());
        assert!(GridSpec::new(0.0, 4).is_err());
    }

    #[test]
    fn propagation_is_unitary_and_reversible() {
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(3), None).unwrap();
        assert_eq!(s.propagate(0.0), s);
        let back = s.propagate(1.3).propagate(-1.3);
        let dev = s.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn three_spins_coherence_is_cos_cubed() {
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(3), None).unwrap();
        for &t in &[0.3, 1.1, std::f64::consts::FRAC_PI_2] {
            let rho = s.propagate(t).reduced_system();
            let sx = ops::expectation(&ops::sigma_x(), &rho).re;
            assert!((sx - t.cos().powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn system_operator_examples() {
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(2), None).unwrap().propagate(0.4);
        let twice = s.apply_system_op(&ops::sigma_x(), false).unwrap().apply_system_op(&ops::sigma_x(), false).unwrap();
        assert_eq!(twice, s);
        let zero = OracleState::build_initial(&SystemAmplitudes::pointer(0), &spins(2), None).unwrap();
        assert_eq!(zero.apply_system_op(&ops::pointer_projector(0), false).unwrap(), zero);
        let init = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(2), None).unwrap();
        let echo = init.propagate(0.8).apply_system_op(&ops::sigma_x(), false).unwrap().propagate(0.8);
        assert!((init.inner(&echo).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_on_product_state() {
        let sys = SystemAmplitudes::rotated(0.3);
        let s = OracleState::build_initial(&sys, &spins(2), None).unwrap();
        let rho = s.reduced(&[0]).unwrap();
        let expect = sys.density();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho[(i, j)] - expect.get(i, j)).norm() < 1e-15);
            }
        }
        assert!(s.mutual_information(&Fragment::prefix(1)).unwrap().abs() < 1e-12);
        assert!(matches!(s.reduced(&[5]), Err(Error::InvalidSubsystems(_))));
    }

    #[test]
    fn reduction_limit() {
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(14), None).unwrap();
        let all: Vec<usize> = (0..15).collect();
        assert_eq!(s.reduced(&all), Err(Error::ReductionTooLarge(1 << 15)));
    }

    #[test]
    fn mutual_information_saturates_at_ln2() {
        // kernel of one spin vanishes at g t = pi/2
        let s = OracleState::build_initial(&SystemAmplitudes::plus(), &spins(3), None).unwrap();
        let mi = s.propagate(std::f64::consts::FRAC_PI_2).mutual_information(&Fragment::prefix(1)).unwrap();
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-10);
    }
}
