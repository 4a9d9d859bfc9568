use std::sync::Arc;

use super::check_grid;
use crate::analytic::BranchLedger;
use crate::error::Result;
use crate::model::{ModelParams, SystemAmplitudes};

/// Entropy (nats) of `e^{-i phi sigma_y}|0>` under free evolution;
/// `entropy[i][k]` belongs to `phis[i]` at `times[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveTable {
    pub phis: Vec<f64>,
    pub times: Vec<f64>,
    pub entropy: Vec<Vec<f64>>,
}

pub fn sieve(params: Arc<ModelParams>, phis: &[f64], times: &[f64]) -> Result<SieveTable> {
    check_grid(times)?;
    let entropy = phis
        .iter()
        .map(|&phi| {
            let init = BranchLedger::initial(&SystemAmplitudes::rotated(phi), params.clone());
            times.iter().map(|&t| Ok(init.evolve(t)?.reduced_density()?.entropy())).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SieveTable { phis: phis.to_vec(), times: times.to_vec(), entropy })
}
