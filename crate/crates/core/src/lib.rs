//! Exact simulation and classicality diagnostics for a qubit coupled to
//! environment particles through `H = (1/2) sigma_z (x) sum_j g_j q_j`.
//!
//! * [`model`]: environment particles, rates and the characteristic-function
//!   kernel through which the environment enters every quantity.
//! * [`analytic`]: exact branch-ledger propagation of the global state under
//!   free evolution interleaved with local system operations.
//! * [`oracle`]: brute-force state vectors used to cross-check the engines.
//! * [`lindblad`]: the dephasing master equation and regression predictions.
//! * [`classicality`]: sieve, Darwinism, histories, Leggett-Garg and the
//!   pointer-state certifier.

// `!(x >= bound)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod classicality;
pub mod entropy;
pub mod error;
pub mod lindblad;
pub mod model;
pub mod ops;
pub mod oracle;

pub use analytic::{branch_decomposition, global_overlap, Branch, BranchDecomposition, BranchLedger, Ensemble};
pub use entropy::EntropyUnits;
pub use error::{Error, Result};
pub use lindblad::{CorrelatorReport, DephasingGenerator};
pub use model::{
    fragment_rate, kernel, ControlChannel, DensityMatrix2, EnvParticle, Fragment, ModelParams, ParticleKind,
    SystemAmplitudes,
};
pub use ops::Mat2;
pub use oracle::{GridSpec, OracleState};
