//! Model definition: environment particles, rates and the environment
//! characteristic-function kernel.
//!
//! The Hamiltonian is `H = (1/2) sigma_z (x) sum_j g_j q_j`. Every quantity
//! the engines need from the environment is an expectation of
//! `exp(i g_j q_j u)` in the initial particle state, so particles are
//! described by their coupling and their initial position statistics only.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ops::{self, Mat2};

/// Tolerance used for normalization checks on inputs.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParticleKind {
    /// Lorentzian position distribution with scale `gamma`.
    Lorentzian { gamma: f64 },
    /// Two-level particle with `q = +1` (probability `p_plus`) or `q = -1`.
    Dichotomic { p_plus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvParticle {
    coupling: f64,
    kind: ParticleKind,
}

impl EnvParticle {
    pub fn new(coupling: f64, kind: ParticleKind) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(Error::InvalidParticle(format!("coupling {coupling} is not finite")));
        }
        match kind {
            ParticleKind::Lorentzian { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::InvalidParticle(format!("Lorentzian scale {gamma} must be positive")))
            }
            ParticleKind::Dichotomic { p_plus } if !(0.0..=1.0).contains(&p_plus) => {
                Err(Error::InvalidParticle(format!("p_plus {p_plus} outside [0, 1]")))
            }
            _ => Ok(Self { coupling, kind }),
        }
    }

    pub fn lorentzian(coupling: f64, gamma: f64) -> Result<Self> {
        Self::new(coupling, ParticleKind::Lorentzian { gamma })
    }

    pub fn dichotomic(coupling: f64, p_plus: f64) -> Result<Self> {
        Self::new(coupling, ParticleKind::Dichotomic { p_plus })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn is_lorentzian(&self) -> bool {
        matches!(self.kind, ParticleKind::Lorentzian { .. })
    }

    /// Characteristic function `E[exp(i g q u)]` of this particle.
    pub fn kernel(&self, u: f64) -> Complex64 {
        match self.kind {
            ParticleKind::Lorentzian { gamma } => Complex64::from((-self.coupling.abs() * gamma * u.abs()).exp()),
            ParticleKind::Dichotomic { p_plus } => {
                let phase = Complex64::from_polar(1.0, self.coupling * u);
                phase * p_plus + phase.conj() * (1.0 - p_plus)
            }
        }
    }
}

/// Ordered list of environment particles; the order defines the particle
/// indices used by [`Fragment`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    particles: Vec<EnvParticle>,
}

impl ModelParams {
    pub fn new(particles: Vec<EnvParticle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::EmptyEnvironment);
        }
        Ok(Self { particles })
    }

    /// `n` identical Lorentzian particles.
    pub fn uniform_lorentzian(n: usize, coupling: f64, gamma: f64) -> Result<Self> {
        let p = EnvParticle::lorentzian(coupling, gamma)?;
        Self::new(vec![p; n])
    }

    /// `n` identical dichotomic particles.
    pub fn uniform_dichotomic(n: usize, coupling: f64, p_plus: f64) -> Result<Self> {
        let p = EnvParticle::dichotomic(coupling, p_plus)?;
        Self::new(vec![p; n])
    }

    pub fn particles(&self) -> &[EnvParticle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn all_lorentzian(&self) -> bool {
        self.particles.iter().all(EnvParticle::is_lorentzian)
    }

    pub fn all_dichotomic(&self) -> bool {
        !self.particles.iter().any(EnvParticle::is_lorentzian)
    }

    /// The whole environment as a fragment.
    pub fn full(&self) -> Fragment {
        Fragment::prefix(self.len())
    }

    /// Total decoherence rate `Gamma_E = sum_j g_j gamma_j`.
    pub fn total_rate(&self) -> Result<f64> {
        fragment_rate(self, &self.full())
    }

    /// Kernel of the full environment.
    pub fn kernel(&self, u: f64) -> Complex64 {
        self.particles.iter().map(|p| p.kernel(u)).product()
    }
}

/// A subset of environment particle indices (zero-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    indices: Vec<usize>,
}

impl Fragment {
    /// Builds a fragment; indices are sorted and deduplicated.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    /// The first `len` particles.
    pub fn prefix(len: usize) -> Self {
        Self { indices: (0..len).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        match self.indices.last() {
            Some(&i) if i >= params.len() => Err(Error::InvalidFragment { index: i, n: params.len() }),
            _ => Ok(()),
        }
    }

    pub fn complement(&self, params: &ModelParams) -> Self {
        Self { indices: (0..params.len()).filter(|&i| !self.contains(i)).collect() }
    }

    /// Union with a disjoint or overlapping fragment.
    pub fn union(&self, other: &Fragment) -> Self {
        Self::new(self.indices.iter().chain(&other.indices).copied().collect())
    }
}

/// Decay rate `sum_{j in frag} g_j gamma_j` of a Lorentzian fragment.
pub fn fragment_rate(params: &ModelParams, frag: &Fragment) -> Result<f64> {
    frag.validate(params)?;
    frag.indices().iter().try_fold(0.0, |acc, &j| {
        let p = &params.particles()[j];
        match p.kind() {
            ParticleKind::Lorentzian { gamma } if p.coupling() > 0.0 => Ok(acc + p.coupling() * gamma),
            _ => Err(Error::RateUndefined(j)),
        }
    })
}

/// Product of the single-particle characteristic functions over `frag`.
pub fn kernel(params: &ModelParams, frag: &Fragment, u: f64) -> Result<Complex64> {
    frag.validate(params)?;
    Ok(fragment_kernel(params, frag, u))
}

pub(crate) fn fragment_kernel(params: &ModelParams, frag: &Fragment, u: f64) -> Complex64 {
    frag.indices().iter().map(|&j| params.particles()[j].kernel(u)).product()
}

/// Initial system amplitudes `alpha |0> + beta |1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemAmplitudes {
    alpha: Complex64,
    beta: Complex64,
}

impl SystemAmplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { alpha, beta })
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm * norm));
        }
        Self::new(alpha / norm, beta / norm)
    }

    pub fn pointer(z: usize) -> Self {
        assert!(z < 2, "pointer label must be 0 or 1");
        let (one, zero) = (Complex64::from(1.0), Complex64::from(0.0));
        if z == 0 {
            Self { alpha: one, beta: zero }
        } else {
            Self { alpha: zero, beta: one }
        }
    }

    /// `(|0> + |1>)/sqrt(2)`.
    pub fn plus() -> Self {
        let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        Self { alpha: h, beta: h }
    }

    /// `(|0> + i|1>)/sqrt(2)`.
    pub fn plus_i() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: Complex64::new(h, 0.0), beta: Complex64::new(0.0, h) }
    }

    /// `e^{-i phi sigma_y} |0> = cos(phi)|0> + sin(phi)|1>`.
    pub fn rotated(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { alpha: Complex64::from(c), beta: Complex64::from(s) }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn amplitude(&self, z: usize) -> Complex64 {
        if z == 0 {
            self.alpha
        } else {
            self.beta
        }
    }

    pub fn density(&self) -> DensityMatrix2 {
        let (a, b) = (self.alpha, self.beta);
        DensityMatrix2::from_matrix_unchecked(Mat2::new(a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj()))
    }
}

/// A valid qubit density matrix in the pointer basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    matrix: Mat2,
}

impl DensityMatrix2 {
    pub const TOL: f64 = 1e-12;

    pub fn new(matrix: Mat2) -> Result<Self> {
        if !ops::is_finite(&matrix) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        if !ops::is_hermitian(&matrix, Self::TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > Self::TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let [low, _] = ops::hermitian_eigenvalues(&matrix);
        if low < -Self::TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {low:e}")));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: Mat2) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn get(&self, z: usize, zp: usize) -> Complex64 {
        self.matrix[(z, zp)]
    }

    /// The coherence `rho_01`.
    pub fn coherence(&self) -> Complex64 {
        self.matrix[(0, 1)]
    }

    pub fn expectation(&self, observable: &Mat2) -> Complex64 {
        ops::expectation(observable, &self.matrix)
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        ops::hermitian_eigenvalues(&self.matrix)
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        crate::entropy::entropy_from_eigenvalues(self.eigenvalues())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        ops::max_abs_diff(&self.matrix, &other.matrix)
    }
}

/// A completely positive map on the system given by Kraus operators.
///
/// Channels built with [`ControlChannel::new`] are trace preserving; the
/// [`ControlChannel::instrument`] constructor admits trace-nonincreasing
/// operations such as selective projections.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlChannel {
    kraus: Vec<Mat2>,
}

impl ControlChannel {
    pub fn new(kraus: Vec<Mat2>) -> Result<Self> {
        let sum = Self::check(&kraus)?;
        if ops::max_abs_diff(&sum, &ops::identity()) > NORM_TOL {
            return Err(Error::InvalidChannel("sum of K^dag K is not the identity".into()));
        }
        Ok(Self { kraus })
    }

    /// Trace-nonincreasing operation: `sum K^dag K <= I`.
    pub fn instrument(kraus: Vec<Mat2>) -> Result<Self> {
        let sum = Self::check(&kraus)?;
        let [_, top] = ops::hermitian_eigenvalues(&sum);
        if top > 1.0 + NORM_TOL {
            return Err(Error::InvalidChannel(format!("sum of K^dag K exceeds identity ({top})")));
        }
        Ok(Self { kraus })
    }

    fn check(kraus: &[Mat2]) -> Result<Mat2> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        }
        if !kraus.iter().all(ops::is_finite) {
            return Err(Error::InvalidChannel("non-finite Kraus operator".into()));
        }
        Ok(kraus.iter().map(|k| k.adjoint() * k).sum())
    }

    pub fn unitary(u: Mat2) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn identity() -> Self {
        Self { kraus: vec![ops::identity()] }
    }

    /// Spin flip `rho -> sigma_x rho sigma_x`.
    pub fn flip() -> Self {
        Self { kraus: vec![ops::sigma_x()] }
    }

    /// Phase flip `rho -> sigma_z rho sigma_z`.
    pub fn phase_flip() -> Self {
        Self { kraus: vec![ops::sigma_z()] }
    }

    pub fn kraus(&self) -> &[Mat2] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        let sum: Mat2 = self.kraus.iter().map(|k| k.adjoint() * k).sum();
        ops::max_abs_diff(&sum, &ops::identity()) <= NORM_TOL
    }

    /// `sum_a K_a rho K_a^dag` on a bare matrix.
    pub fn apply_matrix(&self, rho: &Mat2) -> Mat2 {
        self.kraus.iter().map(|k| k * rho * k.adjoint()).sum()
    }
}
