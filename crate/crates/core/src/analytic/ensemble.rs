use num_complex::Complex64;

use super::ledger::BranchLedger;
use crate::error::{Error, Result};
use crate::model::{ControlChannel, DensityMatrix2};
use crate::ops::{self, Mat2};

/// Unnormalized mixture of branch ledgers; produced by tracking each Kraus
/// operator of a channel as a separate pure branch of the global state.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<BranchLedger>,
}

impl Ensemble {
    pub fn pure(ledger: BranchLedger) -> Self {
        Self { members: vec![ledger] }
    }

    pub fn members(&self) -> &[BranchLedger] {
        &self.members
    }

    pub fn evolve(&self, dt: f64) -> Result<Self> {
        let members = self.members.iter().map(|m| m.evolve(dt)).collect::<Result<_>>()?;
        Ok(Self { members })
    }

    pub fn apply_channel(&self, channel: &ControlChannel) -> Result<Self> {
        let mut members = Vec::with_capacity(self.members.len() * channel.kraus().len());
        for m in &self.members {
            for k in channel.kraus() {
                let out = m.apply_operator(k, false)?;
                if !out.is_empty() {
                    members.push(out);
                }
            }
        }
        Ok(Self { members })
    }

    /// Sum of the members' reduced system matrices.
    pub fn reduced_matrix(&self) -> Mat2 {
        self.members.iter().map(BranchLedger::reduced_matrix).sum()
    }

    /// Probability of the operations applied so far.
    pub fn probability(&self) -> f64 {
        self.reduced_matrix().trace().re
    }

    /// Reduced state conditional on the applied operations.
    pub fn conditional_density(&self) -> Result<DensityMatrix2> {
        let rho = self.reduced_matrix();
        let p = rho.trace().re;
        if !(p >= super::ledger::ANNIHILATION_THRESHOLD) {
            return Err(Error::AnnihilatedState(p));
        }
        Ok(DensityMatrix2::from_matrix_unchecked(rho / Complex64::from(p)))
    }

    pub fn expectation(&self, observable: &Mat2) -> Complex64 {
        ops::expectation(observable, &self.reduced_matrix())
    }
}
