//! TOML experiment configuration.
//!
//! Every key is optional; missing values fall back to the defaults of the
//! reference experiments (uniform Lorentzian environment with `g = gamma = 1`).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use recoherence_core::classicality::ProjectorSet;
use recoherence_core::model::{ControlChannel, EnvParticle, ModelParams, SystemAmplitudes};
use recoherence_core::ops::{self, Mat2};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub output: OutputSection,
}

/// A scalar applied to every particle or one value per particle.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerParticle {
    Uniform(f64),
    List(Vec<f64>),
}

impl PerParticle {
    fn expand(&self, n: usize, key: &str) -> Result<Vec<f64>, CliError> {
        match self {
            PerParticle::Uniform(v) => Ok(vec![*v; n]),
            PerParticle::List(vs) if vs.len() == n => Ok(vs.clone()),
            PerParticle::List(vs) => Err(CliError::Config(format!("model.{key} has {} entries for n = {n}", vs.len()))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default = "default_n")]
    pub n: usize,
    pub g: Option<PerParticle>,
    pub gamma: Option<PerParticle>,
    pub p_plus: Option<PerParticle>,
}

fn default_kind() -> String {
    "lorentzian".into()
}

fn default_n() -> usize {
    5
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { kind: default_kind(), n: default_n(), g: None, gamma: None, p_plus: None }
    }
}

impl ModelSection {
    pub fn build(&self) -> Result<ModelParams, CliError> {
        self.build_with_n(self.n)
    }

    /// The model with `n` particles; per-particle lists are only valid for
    /// the configured `n`.
    pub fn build_with_n(&self, n: usize) -> Result<ModelParams, CliError> {
        if n == 0 {
            return Err(CliError::Config("model.n must be at least 1".into()));
        }
        let g = self.g.clone().unwrap_or(PerParticle::Uniform(1.0)).expand(n, "g")?;
        let particles = match self.kind.as_str() {
            "lorentzian" => {
                if self.p_plus.is_some() {
                    return Err(CliError::Config("model.p_plus is only valid for dichotomic models".into()));
                }
                let gamma = self.gamma.clone().unwrap_or(PerParticle::Uniform(1.0)).expand(n, "gamma")?;
                g.iter().zip(&gamma).map(|(&g, &gm)| EnvParticle::lorentzian(g, gm)).collect::<Result<Vec<_>, _>>()?
            }
            "dichotomic" => {
                if self.gamma.is_some() {
                    return Err(CliError::Config("model.gamma is only valid for Lorentzian models".into()));
                }
                let p = self.p_plus.clone().unwrap_or(PerParticle::Uniform(0.5)).expand(n, "p_plus")?;
                g.iter().zip(&p).map(|(&g, &p)| EnvParticle::dichotomic(g, p)).collect::<Result<Vec<_>, _>>()?
            }
            other => return Err(CliError::Config(format!("unknown model.kind '{other}' (lorentzian | dichotomic)"))),
        };
        Ok(ModelParams::new(particles)?)
    }
}

/// Inclusive uniform grid.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start >= 0.0) {
            return Err(CliError::Config("time grid bounds must be finite and nonnegative".into()));
        }
        match self.count {
            0 => Err(CliError::Config("time grid count must be at least 1".into())),
            1 if self.start == self.stop => Ok(vec![self.start]),
            1 => Err(CliError::Config("a one-point grid needs start == stop".into())),
            _ if self.stop <= self.start => Err(CliError::Config("time grid needs stop > start".into())),
            c => {
                let span = self.stop - self.start;
                Ok((0..c).map(|k| self.start + span * k as f64 / (c - 1) as f64).collect())
            }
        }
    }
}

/// Named or explicit initial system state.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Named(String),
    Amplitudes { alpha: [f64; 2], beta: [f64; 2] },
}

impl StateSpec {
    pub fn build(&self) -> Result<SystemAmplitudes, CliError> {
        match self {
            StateSpec::Named(name) => match name.as_str() {
                "plus" => Ok(SystemAmplitudes::plus()),
                "zero" => Ok(SystemAmplitudes::pointer(0)),
                "one" => Ok(SystemAmplitudes::pointer(1)),
                "plus_i" => Ok(SystemAmplitudes::plus_i()),
                other => Err(CliError::Config(format!(
                    "unknown state '{other}' (plus | zero | one | plus_i | {{alpha, beta}})"
                ))),
            },
            StateSpec::Amplitudes { alpha, beta } => {
                Ok(SystemAmplitudes::normalized(Complex64::new(alpha[0], alpha[1]), Complex64::new(beta[0], beta[1]))?)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateSpec::Named(name) => name.clone(),
            StateSpec::Amplitudes { alpha, beta } => {
                format!("alpha=({},{}) beta=({},{})", alpha[0], alpha[1], beta[0], beta[1])
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertionSpec {
    pub time: f64,
    pub op: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Option<String>,
    pub times: Option<TimeGrid>,
    pub phis: Option<Vec<f64>>,
    pub state: Option<StateSpec>,
    pub t_star: Option<f64>,
    pub gamma_t_star: Option<f64>,
    pub n_values: Option<Vec<usize>>,
    pub fragment_sizes: Option<Vec<usize>>,
    pub history_times: Option<Vec<f64>>,
    pub insertions: Option<Vec<InsertionSpec>>,
    pub triples: Option<Vec<[f64; 3]>>,
    pub operators: Option<Vec<String>>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub channels: Option<Vec<String>>,
    pub control: Option<String>,
    pub observable: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub controls: Option<Vec<String>>,
    pub max_ops: Option<usize>,
    pub states: Option<Vec<StateSpec>>,
    pub projectors: Option<String>,
    pub times: Option<TimeGrid>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub units: Option<String>,
}

/// A parsed configuration together with the hash of its source text.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub sha256: String,
    /// Directory relative paths in the config resolve against.
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let (text, base_dir) = match path {
            Some(p) => (
                std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
                p.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (String::new(), PathBuf::from(".")),
        };
        Self::parse(&text, base_dir)
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(Self { config, sha256, base_dir })
    }

    pub fn model(&self) -> Result<Arc<ModelParams>, CliError> {
        Ok(Arc::new(self.config.model.build()?))
    }

    /// Resolves `kraus:PATH` relative to the config file.
    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Every name accepted where an operator or channel is expected.
pub const VALID_NAMES: &str = "I, sx, sy, sz, P0, P1, identity, flip, phase, kraus:PATH";

/// Single operator by name.
pub fn operator(name: &str) -> Result<Mat2, CliError> {
    match name {
        "I" => Ok(ops::identity()),
        "sx" => Ok(ops::sigma_x()),
        "sy" => Ok(ops::sigma_y()),
        "sz" => Ok(ops::sigma_z()),
        "P0" => Ok(ops::pointer_projector(0)),
        "P1" => Ok(ops::pointer_projector(1)),
        other => Err(CliError::Config(format!("unknown operator name '{other}'; valid names: {VALID_NAMES}"))),
    }
}

/// Channel by name; `kraus:PATH` reads a JSON list of 2x2 complex
/// matrices, each entry written as `[re, im]`.
pub fn channel(name: &str, loaded: &LoadedConfig) -> Result<ControlChannel, CliError> {
    match name {
        "identity" | "I" => Ok(ControlChannel::identity()),
        "flip" | "sx" => Ok(ControlChannel::flip()),
        "phase" | "sz" => Ok(ControlChannel::phase_flip()),
        other => match other.strip_prefix("kraus:") {
            Some(path) => {
                let path = loaded.resolve(path);
                let text =
                    std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let raw: Vec<[[[f64; 2]; 2]; 2]> =
                    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let kraus = raw
                    .iter()
                    .map(|m| {
                        Mat2::new(
                            Complex64::new(m[0][0][0], m[0][0][1]),
                            Complex64::new(m[0][1][0], m[0][1][1]),
                            Complex64::new(m[1][0][0], m[1][0][1]),
                            Complex64::new(m[1][1][0], m[1][1][1]),
                        )
                    })
                    .collect();
                Ok(ControlChannel::instrument(kraus)?)
            }
            None => Err(CliError::Config(format!("unknown operator name '{other}'; valid names: {VALID_NAMES}"))),
        },
    }
}

pub fn projector_set(name: &str) -> Result<ProjectorSet, CliError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let basis = match name {
        "z" => return Ok(ProjectorSet::pointer()),
        "x" => Mat2::new(Complex64::from(h), Complex64::from(h), Complex64::from(h), Complex64::from(-h)),
        "y" => Mat2::new(Complex64::from(h), Complex64::from(h), Complex64::new(0.0, h), Complex64::new(0.0, -h)),
        other => return Err(CliError::Config(format!("unknown projector set '{other}' (z | x | y)"))),
    };
    Ok(ProjectorSet::from_basis(&basis)?)
}
