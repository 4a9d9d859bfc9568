//! Search for local control sequences that keep the system state away from
//! its dephased version.
//!
//! A projector set `{Pi_n}` passes for `(epsilon, tau)` when, for every
//! searched control sequence applied at grid times `t_1 < ... < t_n` and
//! every grid probe time `t >= t_n + tau`, the conditional system state
//! satisfies `(1/2) ||rho - sum_n Pi_n rho Pi_n||_1 <= epsilon`. The verdict
//! is relative to the finite control set, time grid and initial-state set.

use std::sync::Arc;

use num_complex::Complex64;

use super::check_grid;
use crate::analytic::{BranchLedger, Ensemble};
use crate::error::{Error, Result};
use crate::model::{ControlChannel, DensityMatrix2, ModelParams, SystemAmplitudes, NORM_TOL};
use crate::ops::{self, Mat2};
use crate::oracle::{GridSpec, OracleState};

/// Distances closer than this are ties, resolved by enumeration order.
const TIE_TOL: f64 = 1e-12;
/// Distances within this of `epsilon` count as passing.
pub const VERDICT_TOL: f64 = 1e-12;

/// Complete set of orthogonal projectors on the qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    projectors: Vec<Mat2>,
}

impl ProjectorSet {
    pub fn new(projectors: Vec<Mat2>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidProjectors("empty set".into()));
        }
        for (i, p) in projectors.iter().enumerate() {
            if !ops::is_hermitian(p, NORM_TOL) || ops::max_abs_diff(&(p * p), p) > NORM_TOL {
                return Err(Error::InvalidProjectors(format!("element {i} is not an orthogonal projector")));
            }
            if p.trace().re < 0.5 {
                return Err(Error::InvalidProjectors(format!("element {i} is zero")));
            }
            for q in &projectors[..i] {
                if (p * q).iter().any(|c| c.norm() > NORM_TOL) {
                    return Err(Error::InvalidProjectors("projectors are not mutually orthogonal".into()));
                }
            }
        }
        let sum: Mat2 = projectors.iter().sum();
        if ops::max_abs_diff(&sum, &ops::identity()) > NORM_TOL {
            return Err(Error::InvalidProjectors("projectors do not sum to the identity".into()));
        }
        Ok(Self { projectors })
    }

    /// `{|0><0|, |1><1|}`.
    pub fn pointer() -> Self {
        Self { projectors: vec![ops::pointer_projector(0), ops::pointer_projector(1)] }
    }

    /// Rank-one projectors onto an orthonormal basis given as the columns
    /// of a unitary.
    pub fn from_basis(u: &Mat2) -> Result<Self> {
        if !ops::is_unitary(u, NORM_TOL) {
            return Err(Error::InvalidProjectors("basis matrix is not unitary".into()));
        }
        let projectors = (0..2)
            .map(|k| {
                let v = u.column(k);
                v * v.adjoint()
            })
            .collect();
        Self::new(projectors)
    }

    pub fn projectors(&self) -> &[Mat2] {
        &self.projectors
    }

    /// `sum_n Pi_n rho Pi_n`.
    pub fn dephase(&self, rho: &Mat2) -> Mat2 {
        self.projectors.iter().map(|p| p * rho * p).sum()
    }

    /// `(1/2) ||rho - Delta rho||_1`.
    pub fn distance(&self, rho: &Mat2) -> f64 {
        0.5 * ops::trace_norm_hermitian(&(rho - self.dephase(rho)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifierConfig {
    pub epsilon: f64,
    pub tau: f64,
    pub controls: Vec<ControlChannel>,
    pub max_ops: usize,
    /// Candidate control and probe times.
    pub times: Vec<f64>,
    pub initial_states: Vec<SystemAmplitudes>,
}

impl CertifierConfig {
    /// Initial states `|+>`, `|0>` and `(|0> + i|1>)/sqrt(2)`.
    pub fn default_initial_states() -> Vec<SystemAmplitudes> {
        vec![SystemAmplitudes::plus(), SystemAmplitudes::pointer(0), SystemAmplitudes::plus_i()]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidConfig("epsilon and tau must be nonnegative".into()));
        }
        if self.controls.is_empty() || self.initial_states.is_empty() {
            return Err(Error::InvalidConfig("control set and initial-state set must be nonempty".into()));
        }
        if self.max_ops == 0 {
            return Err(Error::InvalidConfig("max_ops must be at least 1".into()));
        }
        check_grid(&self.times)
    }
}

/// A control sequence and probe reaching the reported distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Indices into the configured control set, in application order.
    pub controls: Vec<usize>,
    pub control_times: Vec<f64>,
    pub probe_time: f64,
    /// Index into the configured initial-state set.
    pub initial_state: usize,
    pub distance: f64,
}

impl Witness {
    fn order_key(&self) -> (usize, &[f64], f64, &[usize], usize) {
        (self.controls.len(), &self.control_times, self.probe_time, &self.controls, self.initial_state)
    }

    fn precedes(&self, other: &Witness) -> bool {
        let (a, b) = (self.order_key(), other.order_key());
        a.0.cmp(&b.0)
            .then_with(|| cmp_slices(a.1, b.1))
            .then_with(|| a.2.total_cmp(&b.2))
            .then_with(|| a.3.cmp(b.3))
            .then_with(|| a.4.cmp(&b.4))
            .is_lt()
    }
}

fn cmp_slices(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or_else(|| a.len().cmp(&b.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifierVerdict {
    pub pass: bool,
    pub worst_distance: f64,
    /// Present iff the verdict fails.
    pub witness: Option<Witness>,
    /// Number of (sequence, probe) pairs evaluated.
    pub evaluated: usize,
    /// Control prefixes skipped because they annihilate the state.
    pub skipped: usize,
}

struct Search<'a> {
    projectors: &'a ProjectorSet,
    config: &'a CertifierConfig,
    best: Option<Witness>,
    evaluated: usize,
    skipped: usize,
}

impl Search<'_> {
    fn offer(&mut self, candidate: Witness) {
        let replace = match &self.best {
            None => true,
            Some(best) => {
                candidate.distance > best.distance + TIE_TOL
                    || ((candidate.distance - best.distance).abs() <= TIE_TOL && candidate.precedes(best))
            }
        };
        if replace {
            self.best = Some(candidate);
        }
    }

    /// Explores all extensions of a control prefix whose last operation
    /// happened at `times[last]`.
    fn explore(
        &mut self,
        state: &Ensemble,
        now: f64,
        last: Option<usize>,
        controls: &mut Vec<usize>,
        control_times: &mut Vec<f64>,
        initial_state: usize,
    ) -> Result<()> {
        let times = &self.config.times;
        if !controls.is_empty() {
            let earliest = now + self.config.tau;
            let slack = 1e-12 * earliest.abs().max(1.0);
            for &probe in times.iter().filter(|&&t| t >= earliest - slack) {
                let rho = state.evolve(probe - now)?.conditional_density()?;
                self.evaluated += 1;
                self.offer(Witness {
                    controls: controls.clone(),
                    control_times: control_times.clone(),
                    probe_time: probe,
                    initial_state,
                    distance: self.projectors.distance(rho.matrix()),
                });
            }
        }
        if controls.len() == self.config.max_ops {
            return Ok(());
        }
        let start = last.map_or(0, |i| i + 1);
        for (k, &t) in times.iter().enumerate().skip(start) {
            let advanced = state.evolve(t - now)?;
            for (c, channel) in self.config.controls.iter().enumerate() {
                let next = advanced.apply_channel(channel)?;
                if !(next.probability() >= crate::analytic::ANNIHILATION_THRESHOLD) {
                    self.skipped += 1;
                    continue;
                }
                controls.push(c);
                control_times.push(t);
                self.explore(&next, t, Some(k), controls, control_times, initial_state)?;
                controls.pop();
                control_times.pop();
            }
        }
        Ok(())
    }
}

/// Exhaustive search over the configured family; see the module docs.
pub fn certify(
    params: Arc<ModelParams>,
    projectors: &ProjectorSet,
    config: &CertifierConfig,
) -> Result<CertifierVerdict> {
    config.validate()?;
    let mut search = Search { projectors, config, best: None, evaluated: 0, skipped: 0 };
    for (i, sys) in config.initial_states.iter().enumerate() {
        let root = Ensemble::pure(BranchLedger::initial(sys, params.clone()));
        search.explore(&root, 0.0, None, &mut Vec::new(), &mut Vec::new(), i)?;
    }
    let worst = search.best;
    let worst_distance = worst.as_ref().map_or(0.0, |w| w.distance);
    let pass = worst_distance <= config.epsilon + VERDICT_TOL;
    Ok(CertifierVerdict {
        pass,
        worst_distance,
        witness: if pass { None } else { worst },
        evaluated: search.evaluated,
        skipped: search.skipped,
    })
}

fn witness_sequence<'a>(
    config: &'a CertifierConfig,
    witness: &Witness,
) -> Result<(SystemAmplitudes, Vec<(f64, &'a ControlChannel)>)> {
    let sys = *config
        .initial_states
        .get(witness.initial_state)
        .ok_or_else(|| Error::InvalidConfig("witness initial state out of range".into()))?;
    let steps = witness
        .controls
        .iter()
        .zip(&witness.control_times)
        .map(|(&c, &t)| {
            config
                .controls
                .get(c)
                .map(|ch| (t, ch))
                .ok_or_else(|| Error::InvalidConfig("witness control out of range".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sys, steps))
}

/// Re-evaluates a witness with the exact engine.
pub fn evaluate_witness(
    params: Arc<ModelParams>,
    projectors: &ProjectorSet,
    config: &CertifierConfig,
    witness: &Witness,
) -> Result<f64> {
    let (sys, steps) = witness_sequence(config, witness)?;
    let mut state = Ensemble::pure(BranchLedger::initial(&sys, params));
    let mut now = 0.0;
    for (t, channel) in steps {
        state = state.evolve(t - now)?.apply_channel(channel)?;
        now = t;
    }
    let rho = state.evolve(witness.probe_time - now)?.conditional_density()?;
    Ok(projectors.distance(rho.matrix()))
}

/// Re-evaluates a witness with the dense state-vector oracle, expanding
/// every Kraus path into its own pure state.
pub fn oracle_witness_distance(
    params: &ModelParams,
    grid: Option<GridSpec>,
    projectors: &ProjectorSet,
    config: &CertifierConfig,
    witness: &Witness,
) -> Result<f64> {
    let (sys, steps) = witness_sequence(config, witness)?;
    let mut paths = vec![OracleState::build_initial(&sys, params, grid)?];
    let mut now = 0.0;
    for (t, channel) in steps {
        paths = paths
            .iter()
            .flat_map(|s| {
                let evolved = s.propagate(t - now);
                channel.kraus().iter().map(move |k| evolved.apply_system_op(k, false)).collect::<Vec<_>>()
            })
            .collect::<Result<Vec<_>>>()?;
        now = t;
    }
    let rho: Mat2 = paths.iter().map(|s| s.propagate(witness.probe_time - now).reduced_system()).sum();
    let p = rho.trace().re;
    if !(p >= crate::analytic::ANNIHILATION_THRESHOLD) {
        return Err(Error::AnnihilatedState(p));
    }
    let rho = DensityMatrix2::from_matrix_unchecked(rho / Complex64::from(p));
    Ok(projectors.distance(rho.matrix()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz() -> Arc<ModelParams> {
        Arc::new(ModelParams::uniform_lorentzian(2, 1.0, 0.5).unwrap())
    }

    fn grid(count: usize, stop: f64) -> Vec<f64> {
        (0..count).map(|k| stop * k as f64 / (count - 1) as f64).collect()
    }

    fn config(controls: Vec<ControlChannel>, epsilon: f64, tau: f64) -> CertifierConfig {
        CertifierConfig {
            epsilon,
            tau,
            controls,
            max_ops: 2,
            times: grid(9, 4.0),
            initial_states: vec![SystemAmplitudes::plus()],
        }
    }

    #[test]
    fn projector_validation() {
        assert!(ProjectorSet::new(vec![ops::pointer_projector(0)]).is_err());
        assert!(ProjectorSet::new(vec![ops::identity()]).is_ok());
        assert!(ProjectorSet::new(vec![ops::pointer_projector(0), ops::pointer_projector(0)]).is_err());
        assert!(ProjectorSet::new(vec![ops::sigma_x(), ops::identity() - ops::sigma_x()]).is_err());
        let hadamard = (ops::sigma_x() + ops::sigma_z()) * Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        let x_basis = ProjectorSet::from_basis(&hadamard).unwrap();
        // |+> is diagonal in the x basis
        assert!(x_basis.distance(SystemAmplitudes::plus().density().matrix()) < 1e-15);
        assert!((ProjectorSet::pointer().distance(SystemAmplitudes::plus().density().matrix()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_controls_pass_at_the_decay_bound() {
        let tau = 1.0f64;
        let bound = 0.5 * (-tau).exp();
        let verdict =
            certify(lorentz(), &ProjectorSet::pointer(), &config(vec![ControlChannel::identity()], bound, tau))
                .unwrap();
        assert!(verdict.pass);
        assert!(verdict.witness.is_none());
        assert!((verdict.worst_distance - bound).abs() < 1e-15);
    }

    #[test]
    fn flip_witness_fails() {
        let cfg = config(vec![ControlChannel::identity(), ControlChannel::flip()], 0.1, 1.0);
        let verdict = certify(lorentz(), &ProjectorSet::pointer(), &cfg).unwrap();
        assert!(!verdict.pass);
        assert!((verdict.worst_distance - 0.5).abs() < 1e-12);
        let w = verdict.witness.unwrap();
        // fewest ops and earliest times: a single flip at t = 1, probe at 2
        assert_eq!(w.controls, vec![1]);
        assert_eq!(w.control_times, vec![1.0]);
        assert_eq!(w.probe_time, 2.0);
        let again = evaluate_witness(lorentz(), &ProjectorSet::pointer(), &cfg, &w).unwrap();
        assert!((again - w.distance).abs() < 1e-15);
    }

    #[test]
    fn selective_controls_that_annihilate_are_skipped() {
        let project_one = ControlChannel::instrument(vec![ops::pointer_projector(1)]).unwrap();
        let mut cfg = config(vec![project_one], 0.5, 0.0);
        cfg.initial_states = vec![SystemAmplitudes::pointer(0)];
        cfg.max_ops = 1;
        let verdict = certify(lorentz(), &ProjectorSet::pointer(), &cfg).unwrap();
        assert!(verdict.pass);
        assert_eq!(verdict.evaluated, 0);
        assert_eq!(verdict.skipped, cfg.times.len());
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(vec![ControlChannel::identity()], 0.1, 1.0);
        cfg.max_ops = 0;
        assert!(certify(lorentz(), &ProjectorSet::pointer(), &cfg).is_err());
        let mut cfg = config(vec![], 0.1, 1.0);
        assert!(certify(lorentz(), &ProjectorSet::pointer(), &cfg).is_err());
        cfg.controls = vec![ControlChannel::identity()];
        cfg.times = vec![1.0, 0.5];
        assert!(certify(lorentz(), &ProjectorSet::pointer(), &cfg).is_err());
    }

    #[test]
    fn oracle_replay_matches_for_spins() {
        let spins = Arc::new(ModelParams::uniform_dichotomic(3, 0.7, 0.4).unwrap());
        let cfg = CertifierConfig {
            initial_states: CertifierConfig::default_initial_states(),
            ..config(vec![ControlChannel::flip(), ControlChannel::phase_flip()], 0.05, 0.5)
        };
        let verdict = certify(spins.clone(), &ProjectorSet::pointer(), &cfg).unwrap();
        let w = verdict.witness.expect("spin environments recohere");
        let replay = oracle_witness_distance(&spins, None, &ProjectorSet::pointer(), &cfg, &w).unwrap();
        assert!((replay - w.distance).abs() < 1e-10);
    }
}
