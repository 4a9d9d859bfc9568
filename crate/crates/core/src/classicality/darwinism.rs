use std::sync::Arc;

use num_complex::Complex64;

use crate::analytic::{branch_decomposition, BranchLedger};
use crate::error::{Error, Result};
use crate::model::{fragment_rate, Fragment, ModelParams, SystemAmplitudes};

/// Quantum Darwinism data for the fragment made of the first `size`
/// particles.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentReport {
    pub size: usize,
    /// `<phi_0|phi_1>_F`.
    pub overlap: Complex64,
    /// `exp(-Gamma_F t)` when the fragment is Lorentzian.
    pub expected_overlap: Option<f64>,
    pub fragment_rate: Option<f64>,
    /// `I(S:F)` in nats.
    pub mutual_information: f64,
}

impl FragmentReport {
    pub fn rate_deviation(&self) -> Option<f64> {
        self.expected_overlap.map(|e| (self.overlap - e).norm())
    }
}

pub fn qd_report(
    params: Arc<ModelParams>,
    sys: &SystemAmplitudes,
    t: f64,
    sizes: &[usize],
) -> Result<Vec<FragmentReport>> {
    let n = params.len();
    if let Some(&bad) = sizes.iter().find(|&&s| s == 0 || s >= n) {
        return Err(Error::InvalidConfig(format!("fragment size {bad} must lie in [1, {}]", n.saturating_sub(1))));
    }
    let ledger = BranchLedger::initial(sys, params.clone()).evolve(t)?;
    sizes
        .iter()
        .map(|&size| {
            let frag = Fragment::prefix(size);
            let decomposition = branch_decomposition(&ledger, &frag)?;
            // a pointer initial state has a single branch: the overlap is
            // evaluated between the two conditional fragment states anyway
            let overlap =
                decomposition.fragment_overlap().unwrap_or_else(|| crate::model::fragment_kernel(&params, &frag, -t));
            let rate = fragment_rate(&params, &frag).ok();
            Ok(FragmentReport {
                size,
                overlap,
                expected_overlap: rate.map(|r| (-r * t).exp()),
                fragment_rate: rate,
                mutual_information: ledger.mutual_information(&frag)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn overlap_and_information() {
        let p = Arc::new(ModelParams::uniform_lorentzian(6, 1.0, 1.0).unwrap());
        let plus = SystemAmplitudes::plus();
        let at_zero = qd_report(p.clone(), &plus, 0.0, &[1, 3]).unwrap();
        assert!(at_zero.iter().all(|r| r.overlap == Complex64::from(1.0) && r.mutual_information.abs() < 1e-12));
        let r = &qd_report(p.clone(), &plus, 1.0, &[3]).unwrap()[0];
        assert!((r.overlap.re - 0.049_787_068_367_863_944).abs() < 1e-15);
        assert!(r.rate_deviation().unwrap() < 1e-15);
        let late = &qd_report(p.clone(), &plus, 30.0, &[2]).unwrap()[0];
        assert!((late.mutual_information - LN_2).abs() < 1e-10);
        assert!(qd_report(p, &plus, 1.0, &[0]).is_err());
    }

    #[test]
    fn dichotomic_has_no_expected_overlap() {
        let p = Arc::new(ModelParams::uniform_dichotomic(3, 1.0, 0.5).unwrap());
        let r = &qd_report(p, &SystemAmplitudes::plus(), 0.4, &[1]).unwrap()[0];
        assert_eq!(r.expected_overlap, None);
        assert!((r.overlap.re - 0.4f64.cos()).abs() < 1e-15);
    }
}
