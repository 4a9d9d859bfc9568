//! Dense state-vector recomputation of CLI quantities.

use num_complex::Complex64;
use recoherence_core::classicality::Insertion;
use recoherence_core::entropy::entropy_from_eigenvalues;
use recoherence_core::model::{ControlChannel, Fragment, ModelParams, ParticleKind, SystemAmplitudes};
use recoherence_core::ops::{self, Mat2};
use recoherence_core::{GridSpec, OracleState};

use crate::error::CliError;

/// Largest environment the dichotomic oracle accepts from the CLI.
pub const MAX_DICHOTOMIC_PARTICLES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OracleMode {
    #[default]
    Off,
    Dichotomic,
    Grid,
}

/// A validated oracle for one model.
#[derive(Debug, Clone)]
pub struct Oracle {
    params: ModelParams,
    grid: Option<GridSpec>,
}

impl Oracle {
    pub fn for_mode(mode: OracleMode, params: &ModelParams) -> Result<Option<Self>, CliError> {
        match mode {
            OracleMode::Off => Ok(None),
            OracleMode::Dichotomic => {
                if !params.all_dichotomic() || params.len() > MAX_DICHOTOMIC_PARTICLES {
                    return Err(CliError::Config(format!(
                        "--oracle dichotomic needs an all-dichotomic model with at most {MAX_DICHOTOMIC_PARTICLES} particles"
                    )));
                }
                Ok(Some(Self { params: params.clone(), grid: None }))
            }
            OracleMode::Grid => match params.particles() {
                [p] => match p.kind() {
                    ParticleKind::Lorentzian { gamma } => {
                        Ok(Some(Self { params: params.clone(), grid: Some(GridSpec::default_for(gamma)) }))
                    }
                    _ => Err(CliError::Config("--oracle grid needs a Lorentzian particle".into())),
                },
                _ => Err(CliError::Config("--oracle grid needs a model with exactly one particle".into())),
            },
        }
    }

    pub fn initial(&self, sys: &SystemAmplitudes) -> Result<OracleState, CliError> {
        Ok(OracleState::build_initial(sys, &self.params, self.grid)?)
    }

    pub fn entropy(&self, sys: &SystemAmplitudes, t: f64) -> Result<f64, CliError> {
        let rho = self.initial(sys)?.propagate(t).reduced_system();
        Ok(entropy_from_eigenvalues(ops::hermitian_eigenvalues(&rho)))
    }

    /// `<O>(t)` with optional unitary/instrument control at `t_star`.
    pub fn expectation(
        &self,
        sys: &SystemAmplitudes,
        control: Option<(&ControlChannel, f64)>,
        observable: &Mat2,
        t: f64,
    ) -> Result<Complex64, CliError> {
        let rho = self.evolve_paths(sys, control, t)?;
        Ok(ops::expectation(observable, &rho))
    }

    /// Unnormalized reduced state summed over Kraus paths.
    fn evolve_paths(
        &self,
        sys: &SystemAmplitudes,
        control: Option<(&ControlChannel, f64)>,
        t: f64,
    ) -> Result<Mat2, CliError> {
        let init = self.initial(sys)?;
        let paths = match control {
            Some((channel, t_star)) if t >= t_star => {
                let before = init.propagate(t_star);
                channel
                    .kraus()
                    .iter()
                    .map(|k| Ok(before.apply_system_op(k, false)?.propagate(t - t_star)))
                    .collect::<Result<Vec<_>, CliError>>()?
            }
            _ => vec![init.propagate(t)],
        };
        Ok(paths.iter().map(OracleState::reduced_system).sum())
    }

    /// `<A^dag U_t Psi | U_{t-s} B U_s Psi>`.
    pub fn two_time(&self, a: &Mat2, b: &Mat2, t: f64, s: f64, sys: &SystemAmplitudes) -> Result<Complex64, CliError> {
        let init = self.initial(sys)?;
        let right = init.propagate(s).apply_system_op(b, false)?.propagate(t - s);
        let left = init.propagate(t).apply_system_op(&a.adjoint(), false)?;
        Ok(left.inner(&right))
    }

    pub fn mutual_information(&self, sys: &SystemAmplitudes, t: f64, frag: &Fragment) -> Result<f64, CliError> {
        Ok(self.initial(sys)?.propagate(t).mutual_information(frag)?)
    }

    /// `<phi_0(t)|phi_1(t)>` on the fragment alone.
    pub fn fragment_overlap(&self, frag: &Fragment, t: f64) -> Result<Complex64, CliError> {
        let particles = frag.indices().iter().map(|&j| self.params.particles()[j]).collect();
        let sub = Self { params: ModelParams::new(particles)?, grid: self.grid };
        let zero = sub.initial(&SystemAmplitudes::pointer(0))?.propagate(t);
        let one = sub.initial(&SystemAmplitudes::pointer(1))?.propagate(t).apply_system_op(&ops::sigma_x(), false)?;
        Ok(zero.inner(&one))
    }

    /// Decoherence functional entries in the ordering of `histories`.
    pub fn decoherence_functional(
        &self,
        sys: &SystemAmplitudes,
        times: &[f64],
        insertions: &[Insertion],
        histories: &[Vec<usize>],
    ) -> Result<Vec<Vec<Complex64>>, CliError> {
        let states = histories
            .iter()
            .map(|labels| {
                let mut events: Vec<(f64, Mat2)> = insertions.iter().map(|i| (i.time, i.operator)).collect();
                events.extend(times.iter().zip(labels).map(|(&t, &z)| (t, ops::pointer_projector(z))));
                events.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut state = self.initial(sys)?;
                let mut now = 0.0;
                for (time, op) in events {
                    state = state.propagate(time - now).apply_system_op(&op, false)?;
                    now = time;
                }
                Ok(state)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(states.iter().map(|si| states.iter().map(|sj| sj.inner(si)).collect()).collect())
    }

    /// `C(t_a, t_b)` from sequential pointer measurements.
    pub fn pointer_correlator(&self, sys: &SystemAmplitudes, t_a: f64, t_b: f64) -> Result<f64, CliError> {
        let first = self.initial(sys)?.propagate(t_a);
        let mut c = 0.0;
        for a in 0..2 {
            let after = first.apply_system_op(&ops::pointer_projector(a), false)?.propagate(t_b - t_a);
            for b in 0..2 {
                let p = after.apply_system_op(&ops::pointer_projector(b), false)?.norm_sqr();
                c += ops::sigma_z()[(a, a)].re * ops::sigma_z()[(b, b)].re * p;
            }
        }
        Ok(c)
    }

    pub fn grid(&self) -> Option<GridSpec> {
        self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use recoherence_core::analytic::{branch_decomposition, BranchLedger};
    use recoherence_core::classicality::{decoherence_functional, two_time_correlator};
    use std::sync::Arc;

    fn model() -> ModelParams {
        ModelParams::new(vec![
            recoherence_core::EnvParticle::dichotomic(0.7, 0.3).unwrap(),
            recoherence_core::EnvParticle::dichotomic(1.3, 0.6).unwrap(),
            recoherence_core::EnvParticle::dichotomic(-0.4, 0.5).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn mode_validation() {
        let lor = ModelParams::uniform_lorentzian(2, 1.0, 1.0).unwrap();
        assert!(Oracle::for_mode(OracleMode::Off, &lor).unwrap().is_none());
        assert!(Oracle::for_mode(OracleMode::Dichotomic, &lor).is_err());
        assert!(Oracle::for_mode(OracleMode::Grid, &lor).is_err());
        let one = ModelParams::uniform_lorentzian(1, 1.0, 1.0).unwrap();
        assert!(Oracle::for_mode(OracleMode::Grid, &one).unwrap().unwrap().grid().is_some());
        assert!(
            Oracle::for_mode(OracleMode::Dichotomic, &ModelParams::uniform_dichotomic(7, 1.0, 0.5).unwrap()).is_err()
        );
    }

    #[test]
    fn fragment_overlap_matches_analytic_convention() {
        let params = model();
        let oracle = Oracle::for_mode(OracleMode::Dichotomic, &params).unwrap().unwrap();
        let ledger = BranchLedger::initial(&SystemAmplitudes::plus(), Arc::new(params)).evolve(0.9).unwrap();
        let frag = Fragment::prefix(2);
        let analytic = branch_decomposition(&ledger, &frag).unwrap().fragment_overlap().unwrap();
        assert!((oracle.fragment_overlap(&frag, 0.9).unwrap() - analytic).norm() < 1e-12);
    }

    #[test]
    fn histories_and_correlators_match() {
        let params = model();
        let oracle = Oracle::for_mode(OracleMode::Dichotomic, &params).unwrap().unwrap();
        let sys = SystemAmplitudes::rotated(0.4);
        let times = [0.3, 0.8, 1.1];
        let ins = [Insertion { time: 0.5, operator: ops::sigma_x() }];
        let d = decoherence_functional(Arc::new(params.clone()), &sys, &times, &ins).unwrap();
        let o = oracle.decoherence_functional(&sys, &times, &ins, &d.histories).unwrap();
        for (i, row) in o.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((v - d.matrix[(i, j)]).norm() < 1e-12);
            }
        }
        let c = two_time_correlator(Arc::new(params), &sys, 0.2, 0.9).unwrap();
        assert!((oracle.pointer_correlator(&sys, 0.2, 0.9).unwrap() - c).abs() < 1e-12);
    }
}
