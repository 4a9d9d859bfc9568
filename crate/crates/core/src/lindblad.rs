//! Dephasing master equation `d rho/dt = (Gamma/2)(sigma_z rho sigma_z - rho)`,
//! quantum-regression predictions, and exact-vs-Markov comparisons.

use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{global_overlap, BranchLedger, Ensemble};
use crate::error::{Error, Result};
use crate::model::{ControlChannel, DensityMatrix2, ModelParams, SystemAmplitudes};
use crate::ops::{self, Mat2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingGenerator {
    rate: f64,
}

impl DephasingGenerator {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("dephasing rate {rate} must be nonnegative")));
        }
        Ok(Self { rate })
    }

    /// Generator for the full environment of a Lorentzian model.
    pub fn for_model(params: &ModelParams) -> Result<Self> {
        Self::new(params.total_rate()?)
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// The generator applied to an arbitrary operator.
    pub fn apply(&self, x: &Mat2) -> Mat2 {
        let z = ops::sigma_z();
        (z * x * z - x) * Complex64::from(0.5 * self.rate)
    }

    /// `exp(L t)` on an arbitrary operator: diagonal kept, off-diagonal
    /// damped by `exp(-Gamma t)`.
    pub fn propagate_operator(&self, x: &Mat2, t: f64) -> Result<Mat2> {
        check_time(t)?;
        let damp = Complex64::from((-self.rate * t).exp());
        let mut out = *x;
        out[(0, 1)] *= damp;
        out[(1, 0)] *= damp;
        Ok(out)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    Ok(())
}

fn check_order(s: f64, t: f64) -> Result<()> {
    check_time(s)?;
    if s > t {
        return Err(Error::TimeOrder(format!("s = {s} exceeds t = {t}")));
    }
    Ok(())
}

/// Closed-form solution of the dephasing master equation.
pub fn dephasing_propagate(rho: &DensityMatrix2, t: f64, rate: f64) -> Result<DensityMatrix2> {
    let m = DephasingGenerator::new(rate)?.propagate_operator(rho.matrix(), t)?;
    Ok(DensityMatrix2::from_matrix_unchecked(m))
}

/// Classical RK4 integration of the master equation with `steps` equal steps.
pub fn gksl_integrate(rho: &DensityMatrix2, rate: f64, t: f64, steps: usize) -> Result<DensityMatrix2> {
    check_time(t)?;
    if steps == 0 {
        return Err(Error::InvalidConfig("need at least one integration step".into()));
    }
    let gen = DephasingGenerator::new(rate)?;
    let dt = Complex64::from(t / steps as f64);
    let half = Complex64::from(0.5);
    let sixth = Complex64::from(1.0 / 6.0);
    let two = Complex64::from(2.0);
    let mut x = *rho.matrix();
    for _ in 0..steps {
        let k1 = gen.apply(&x);
        let k2 = gen.apply(&(x + k1 * dt * half));
        let k3 = gen.apply(&(x + k2 * dt * half));
        let k4 = gen.apply(&(x + k3 * dt));
        x += (k1 + k2 * two + k3 * two + k4) * dt * sixth;
    }
    Ok(DensityMatrix2::from_matrix_unchecked(x))
}

/// `<A(t) B(s)> = tr{A U_{t,s} B U_{s,0} |Psi><Psi| U_{s,0}^dag U_{t,s}^dag}`,
/// evaluated exactly as `<A^dag U_t Psi | U_{t-s} B U_s Psi>`.
pub fn exact_two_time(
    a: &Mat2,
    b: &Mat2,
    t: f64,
    s: f64,
    sys: &SystemAmplitudes,
    params: Arc<ModelParams>,
) -> Result<Complex64> {
    check_order(s, t)?;
    let init = BranchLedger::initial(sys, params);
    let right = init.evolve(s)?.apply_operator(b, false)?.evolve(t - s)?;
    let left = init.evolve(t)?.apply_operator(&a.adjoint(), false)?;
    global_overlap(&left, &right)
}

/// Quantum-regression prediction `tr{A e^{L(t-s)} B e^{L s} rho0}`.
pub fn regression_two_time(a: &Mat2, b: &Mat2, t: f64, s: f64, rho0: &DensityMatrix2, rate: f64) -> Result<Complex64> {
    check_order(s, t)?;
    let gen = DephasingGenerator::new(rate)?;
    let first = gen.propagate_operator(rho0.matrix(), s)?;
    let second = gen.propagate_operator(&(b * first), t - s)?;
    Ok((a * second).trace())
}

/// Exact and Markovian expectations of an observable after a control
/// channel, with the absolute discrepancy between them.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorReport {
    pub exact: Complex64,
    pub regression: Complex64,
    pub discrepancy: f64,
    pub control_time: f64,
    pub probe_time: f64,
    pub observable: Mat2,
    pub initial: SystemAmplitudes,
}

/// `<O>(t)` after `channel` is applied at `t*`, exactly and via the master
/// equation. Requires a model with a defined total rate.
pub fn intervention_compare(
    channel: &ControlChannel,
    t_star: f64,
    observable: &Mat2,
    t: f64,
    sys: &SystemAmplitudes,
    params: Arc<ModelParams>,
) -> Result<CorrelatorReport> {
    check_order(t_star, t)?;
    let rate = params.total_rate()?;
    let exact = Ensemble::pure(BranchLedger::initial(sys, params))
        .evolve(t_star)?
        .apply_channel(channel)?
        .evolve(t - t_star)?
        .expectation(observable);
    let gen = DephasingGenerator::new(rate)?;
    let before = gen.propagate_operator(sys.density().matrix(), t_star)?;
    let after = gen.propagate_operator(&channel.apply_matrix(&before), t - t_star)?;
    let regression = ops::expectation(observable, &after);
    Ok(CorrelatorReport {
        exact,
        regression,
        discrepancy: (exact - regression).norm(),
        control_time: t_star,
        probe_time: t,
        observable: *observable,
        initial: *sys,
    })
}
