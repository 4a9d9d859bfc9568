use std::sync::Arc;

use crate::analytic::BranchLedger;
use crate::error::{Error, Result};
use crate::model::{ModelParams, SystemAmplitudes};
use crate::ops;

/// Eigenvalue of `sigma_z` on pointer state `z` (`-1` for `|0>`).
pub fn pointer_value(z: usize) -> f64 {
    ops::sigma_z()[(z, z)].re
}

/// `C(t_a, t_b)` from sequential projective `sigma_z` measurements at
/// `t_a < t_b`; joint probabilities are Gram norms of projected ledgers.
pub fn two_time_correlator(params: Arc<ModelParams>, sys: &SystemAmplitudes, t_a: f64, t_b: f64) -> Result<f64> {
    if !(t_a >= 0.0 && t_b > t_a) {
        return Err(Error::TimeOrder(format!("need 0 <= {t_a} < {t_b}")));
    }
    let first = BranchLedger::initial(sys, params).evolve(t_a)?;
    let mut c = 0.0;
    for a in 0..2 {
        let after_a = first.apply_operator(&ops::pointer_projector(a), false)?.evolve(t_b - t_a)?;
        for b in 0..2 {
            let p = after_a.apply_operator(&ops::pointer_projector(b), false)?.gram_norm();
            c += pointer_value(a) * pointer_value(b) * p;
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgiReport {
    pub times: [f64; 3],
    pub c21: f64,
    pub c32: f64,
    pub c31: f64,
    /// `K3 = C21 + C32 - C31`.
    pub k: f64,
}

pub fn lgi_k3(params: Arc<ModelParams>, sys: &SystemAmplitudes, times: [f64; 3]) -> Result<LgiReport> {
    let [t1, t2, t3] = times;
    if !(t1 >= 0.0 && t1 < t2 && t2 < t3) {
        return Err(Error::TimeOrder(format!("need 0 <= t1 < t2 < t3, got {times:?}")));
    }
    let c21 = two_time_correlator(params.clone(), sys, t1, t2)?;
    let c32 = two_time_correlator(params.clone(), sys, t2, t3)?;
    let c31 = two_time_correlator(params, sys, t1, t3)?;
    Ok(LgiReport { times, c21, c32, c31, k: c21 + c32 - c31 })
}
