use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paim::ActivationRule;
use crate::targets::{grid_expectation, BananaParams, TargetDensity, TargetSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Paim,
    Ipc,
    Both,
}

impl Algorithm {
    pub fn runs_paim(self) -> bool {
        matches!(self, Algorithm::Paim | Algorithm::Both)
    }

    pub fn runs_ipc(self) -> bool {
        matches!(self, Algorithm::Ipc | Algorithm::Both)
    }
}

/// Sampler knobs shared by PAIM and the baseline; the adaptation fields are
/// ignored by the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    pub n_chains: usize,
    pub samples: usize,
    #[serde(default = "default_t_train")]
    pub t_train: u64,
    /// `null` or absent means adaptation never stops.
    #[serde(default)]
    pub t_stop: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub activation_rule: ActivationRule,
    #[serde(default)]
    pub discard_burn_in: bool,
    #[serde(default)]
    pub parallel: bool,
}

fn default_t_train() -> u64 {
    1
}

fn default_epsilon() -> f64 {
    0.4
}

/// Uniform box for initial states and component means, plus the initial
/// proposal spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSettings {
    pub box_lower: Vec<f64>,
    pub box_upper: Vec<f64>,
    pub sigma: f64,
}

impl Default for InitSettings {
    fn default() -> Self {
        Self {
            box_lower: vec![-15.0, -15.0],
            box_upper: vec![15.0, 15.0],
            sigma: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSpec {
    Vector(Vec<f64>),
    Grid {
        lower: Vec<f64>,
        upper: Vec<f64>,
        points: usize,
    },
}

impl TruthSpec {
    pub fn resolve(&self, target: &dyn TargetDensity) -> Result<Vec<f64>> {
        match self {
            TruthSpec::Vector(v) => {
                if v.len() != target.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: target.dim(),
                        actual: v.len(),
                    });
                }
                Ok(v.clone())
            }
            TruthSpec::Grid { lower, upper, points } => grid_expectation(target, lower, upper, *points),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub target: TargetSpec,
    pub sampler: SamplerSettings,
    #[serde(default)]
    pub init: InitSettings,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub truth: Option<TruthSpec>,
}

fn default_replications() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The banana benchmark: `N` chains, `L` samples, grid ground truth
    /// over the initialization box.
    pub fn banana_benchmark(n_chains: usize, samples: usize, t_train: u64, replications: usize, base_seed: u64) -> Self {
        Self {
            algorithm: Algorithm::Both,
            target: TargetSpec::Banana(BananaParams::default()),
            sampler: SamplerSettings {
                n_chains,
                samples,
                t_train,
                t_stop: None,
                epsilon: 0.4,
                activation_rule: ActivationRule::Floor,
                discard_burn_in: false,
                parallel: false,
            },
            init: InitSettings::default(),
            replications,
            base_seed,
            output_dir: None,
            truth: Some(TruthSpec::Grid {
                lower: vec![-15.0, -15.0],
                upper: vec![15.0, 15.0],
                points: 2001,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        if self.truth.is_none() {
            return Err(Error::TruthUnavailable);
        }
        Ok(())
    }
}
