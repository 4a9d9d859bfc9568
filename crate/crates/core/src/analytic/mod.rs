//! Exact propagation of the global pure state through a branch ledger.
//!
//! Every local system operation and every stretch of free evolution keeps
//! the global state a finite sum of terms
//! `a |z> (x) prod_j exp(i g_j q_j theta / 2) |chi_j>`, so overlaps of
//! environment states reduce to the model kernel evaluated at half the
//! difference of accumulated times.

mod decomposition;
mod ensemble;
mod ledger;

pub use decomposition::{branch_decomposition, BranchDecomposition};
pub use ensemble::Ensemble;
pub use ledger::{
    branch_sign, global_overlap, Branch, BranchLedger, ANNIHILATION_THRESHOLD, LEDGER_NORM_TOL, MERGE_TOL,
};
