use thiserror::Error;

/// Errors raised by the model, the engines and the diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid environment particle: {0}")]
    InvalidParticle(String),
    #[error("model needs at least one environment particle")]
    EmptyEnvironment,
    #[error("fragment index {index} out of range for {n} particles")]
    InvalidFragment { index: usize, n: usize },
    #[error("rate undefined for non-Lorentzian particle {0}")]
    RateUndefined(usize),
    #[error("system amplitudes not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid control channel: {0}")]
    InvalidChannel(String),
    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),
    #[error("negative time step {0}")]
    NegativeTime(f64),
    #[error("time ordering violated: {0}")]
    TimeOrder(String),
    #[error("annihilated state: norm {0:e} below threshold")]
    AnnihilatedState(f64),
    #[error("ledger is not normalized")]
    UnnormalizedLedger,
    #[error("ledgers refer to different model parameters")]
    ParamsMismatch,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("Lorentzian particles need a position grid")]
    GridRequired,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("reduction of dimension {0} exceeds the limit")]
    ReductionTooLarge(usize),
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystems(String),
    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("invalid history: {0}")]
    InvalidHistory(String),
    #[error("invalid certifier configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
