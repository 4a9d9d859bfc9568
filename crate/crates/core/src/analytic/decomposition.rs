use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ledger::BranchLedger;
use crate::error::{Error, Result};
use crate::model::{fragment_kernel, Fragment};

/// Branching-form data of a ledger relative to a fragment `F` and its
/// complement.
///
/// In the branching-form regime (at most one branch per pointer label) the
/// Gram matrices are indexed by pointer label, so `fragment_gram[(0, 1)]`
/// is `<phi_0|phi_1>_F`. Otherwise they are indexed by branch and `labels`
/// gives the pointer label of each row.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchDecomposition {
    pub probabilities: [f64; 2],
    pub labels: Vec<usize>,
    pub fragment_gram: DMatrix<Complex64>,
    pub complement_gram: DMatrix<Complex64>,
    /// At most one branch per pointer label.
    pub branching_form: bool,
    /// The fragment or its complement is empty.
    pub degenerate: bool,
}

impl BranchDecomposition {
    /// `<phi_0|phi_1>_F`, when both labels are present in branching form.
    pub fn fragment_overlap(&self) -> Option<Complex64> {
        (self.branching_form && self.labels == [0, 1]).then(|| self.fragment_gram[(0, 1)])
    }

    pub fn complement_overlap(&self) -> Option<Complex64> {
        (self.branching_form && self.labels == [0, 1]).then(|| self.complement_gram[(0, 1)])
    }
}

pub fn branch_decomposition(ledger: &BranchLedger, frag: &Fragment) -> Result<BranchDecomposition> {
    if !ledger.is_normalized() {
        return Err(Error::UnnormalizedLedger);
    }
    let params = ledger.params();
    frag.validate(params)?;
    let complement = frag.complement(params);
    let rho = ledger.reduced_matrix();
    let branches = ledger.branches();
    let gram = |f: &Fragment| {
        DMatrix::from_fn(branches.len(), branches.len(), |k, l| {
            fragment_kernel(params, f, 0.5 * (branches[l].theta - branches[k].theta))
        })
    };
    let counts = ledger.label_counts();
    Ok(BranchDecomposition {
        probabilities: [rho[(0, 0)].re, rho[(1, 1)].re],
        labels: branches.iter().map(|b| b.label).collect(),
        fragment_gram: gram(frag),
        complement_gram: gram(&complement),
        branching_form: counts.iter().all(|&c| c <= 1),
        degenerate: frag.is_empty() || complement.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, SystemAmplitudes};
    use crate::ops;
    use std::sync::Arc;

    #[test]
    fn overlap_decays_with_fragment_rate() {
        let params = Arc::new(ModelParams::uniform_lorentzian(5, 1.0, 0.5).unwrap());
        let sys = SystemAmplitudes::normalized(Complex64::from(0.6), Complex64::from(0.8)).unwrap();
        let init = BranchLedger::initial(&sys, params);
        let frag = Fragment::prefix(2);
        let d0 = branch_decomposition(&init, &frag).unwrap();
        assert_eq!(d0.fragment_overlap(), Some(Complex64::from(1.0)));
        let t = 1.7;
        let d = branch_decomposition(&init.evolve(t).unwrap(), &frag).unwrap();
        assert!((d.fragment_overlap().unwrap() - (-t).exp()).norm() < 1e-15);
        assert!((d.complement_overlap().unwrap() - (-1.5 * t).exp()).norm() < 1e-15);
        assert!((d.probabilities[0] - 0.36).abs() < 1e-15 && (d.probabilities[1] - 0.64).abs() < 1e-15);
        assert!(d.branching_form && !d.degenerate);
    }

    #[test]
    fn flags_degenerate_and_general_regime() {
        let params = Arc::new(ModelParams::uniform_lorentzian(2, 1.0, 1.0).unwrap());
        let init = BranchLedger::initial(&SystemAmplitudes::plus(), params.clone());
        assert!(branch_decomposition(&init, &Fragment::empty()).unwrap().degenerate);
        assert!(branch_decomposition(&init, &params.full()).unwrap().degenerate);
        // a Hadamard after some evolution puts two branches on each label
        let h = (ops::sigma_x() + ops::sigma_z()) * Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        let mixed = init.evolve(0.5).unwrap().apply_operator(&h, false).unwrap();
        let d = branch_decomposition(&mixed, &Fragment::prefix(1)).unwrap();
        assert!(!d.branching_form);
        assert_eq!(d.labels, vec![0, 0, 1, 1]);
        assert!((d.probabilities[0] + d.probabilities[1] - 1.0).abs() < 1e-12);
        assert_eq!(d.fragment_overlap(), None);
    }
}
