//! Classicality diagnostics: predictability sieve, quantum Darwinism,
//! decoherent histories, Leggett-Garg and the `(epsilon, tau)` pointer-state
//! certifier.

mod certify;
mod darwinism;
mod histories;
mod lgi;
mod sieve;

pub use certify::{
    certify, evaluate_witness, oracle_witness_distance, CertifierConfig, CertifierVerdict, ProjectorSet, Witness,
};
pub use darwinism::{qd_report, FragmentReport};
pub use histories::{decoherence_functional, history_state, DecoherenceFunctional, HistorySpec, Insertion};
pub use lgi::{lgi_k3, pointer_value, two_time_correlator, LgiReport};
pub use sieve::{sieve, SieveTable};

use crate::error::{Error, Result};

/// Checks that a time grid is finite, nonnegative and strictly increasing.
pub(crate) fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidConfig("empty time grid".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidConfig("time grid must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("time grid must be strictly increasing".into()));
    }
    Ok(())
}
