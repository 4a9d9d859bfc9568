//! Command-line experiment runner. `recoherence <experiment> --config FILE`
//! writes figure-ready CSV or JSON and exits with a verdict-aware code.

pub mod config;
pub mod crosscheck;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser};
use recoherence_core::EntropyUnits;

pub use config::LoadedConfig;
pub use crosscheck::OracleMode;
pub use error::CliError;
pub use experiments::{run, Experiment, Report, RunContext, Status};

#[derive(Debug, Parser)]
#[command(name = "recoherence", version, about = "Run decoherence and recoherence experiments from a TOML config")]
pub struct Cli {
    #[arg(value_enum)]
    pub experiment: Experiment,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML config; omitted sections take their defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (default: output.path from the config, else stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Entropy units (default: output.units from the config, else nats).
    #[arg(long, value_enum)]
    pub units: Option<UnitsArg>,
    /// Recompute with the dense state-vector oracle and report deviations.
    #[arg(long, value_enum, default_value_t = OracleMode::Off)]
    pub oracle: OracleMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum UnitsArg {
    Nats,
    Bits,
}

fn parse_units(name: &str) -> Result<EntropyUnits, CliError> {
    match name {
        "nats" => Ok(EntropyUnits::Nats),
        "bits" => Ok(EntropyUnits::Bits),
        other => Err(CliError::Config(format!("unknown output.units '{other}' (nats | bits)"))),
    }
}

/// Runs one experiment and writes its output; returns the process exit code.
pub fn execute(cli: &Cli) -> Result<Status, CliError> {
    let loaded = LoadedConfig::load(cli.common.config.as_deref())?;
    let units = match cli.common.units {
        Some(UnitsArg::Nats) => EntropyUnits::Nats,
        Some(UnitsArg::Bits) => EntropyUnits::Bits,
        None => match &loaded.config.output.units {
            Some(name) => parse_units(name)?,
            None => EntropyUnits::Nats,
        },
    };
    let out = cli
        .common
        .out
        .clone()
        .or_else(|| loaded.config.output.path.as_ref().map(|p| loaded.resolve(&p.to_string_lossy())));
    let ctx = RunContext { loaded: &loaded, units, oracle: cli.common.oracle };
    let report = run(cli.experiment, &ctx)?;
    output::emit(&report.text, out.as_deref())?;
    Ok(report.status)
}
