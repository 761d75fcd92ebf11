//! Experiment orchestration: random initialization, seeded replication,
//! MSE reporting and file outputs.

mod config;
mod output;

pub use config::{Algorithm, ExperimentConfig, InitSettings, SamplerSettings, TruthSpec};
pub use output::{emit_outputs, write_experiment, write_run_files, write_summary, ELLIPSE_MASS};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::mse;
use crate::ipc::{run_ipc, IpcConfig};
use crate::paim::{run_paim, Initialization, PaimConfig};
use crate::record::RunRecord;
use crate::rng::{init_rng, replication_seed};
use crate::targets::TargetDensity;

/// Draws every initial state and component mean uniformly in the box; all
/// initial covariances are `sigma² I`.
pub fn random_init<R: Rng + ?Sized>(
    box_lower: &[f64],
    box_upper: &[f64],
    sigma: f64,
    n_chains: usize,
    rng: &mut R,
) -> Result<Initialization> {
    if box_lower.len() != box_upper.len() || box_lower.is_empty() {
        return Err(Error::InvalidConfig("initialization box bounds must have equal, non-zero length".into()));
    }
    if box_lower.iter().zip(box_upper).any(|(l, u)| !(l < u)) {
        return Err(Error::InvalidConfig("initialization box is degenerate".into()));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let mut draw = |_| -> Vec<f64> {
        box_lower
            .iter()
            .zip(box_upper)
            .map(|(&l, &u)| rng.random_range(l..u))
            .collect()
    };
    Ok(Initialization {
        states: (0..n_chains).map(&mut draw).collect(),
        global_means: (0..n_chains).map(&mut draw).collect(),
        local_means: (0..n_chains).map(&mut draw).collect(),
        sigma,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub estimate: Vec<f64>,
    pub budgets: Vec<u64>,
    pub t_tot: u64,
    pub acceptance_rate: f64,
    pub final_active: usize,
}

impl RunSummary {
    fn from_record(seed: u64, record: &RunRecord, discard_burn_in: bool) -> Self {
        Self {
            seed,
            estimate: record.estimate(discard_burn_in),
            budgets: record.budgets.clone(),
            t_tot: record.t_tot,
            acceptance_rate: record.acceptance_rate(),
            final_active: record.final_active().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub mse: f64,
    pub mean_acceptance_rate: f64,
    pub mean_t_tot: f64,
    pub mean_final_active: f64,
    pub runs: Vec<RunSummary>,
}

impl AlgorithmSummary {
    fn new(runs: Vec<RunSummary>, truth: &[f64]) -> Result<Self> {
        let estimates: Vec<Vec<f64>> = runs.iter().map(|r| r.estimate.clone()).collect();
        let r = runs.len() as f64;
        Ok(Self {
            mse: mse(&estimates, truth)?,
            mean_acceptance_rate: runs.iter().map(|x| x.acceptance_rate).sum::<f64>() / r,
            mean_t_tot: runs.iter().map(|x| x.t_tot as f64).sum::<f64>() / r,
            mean_final_active: runs.iter().map(|x| x.final_active as f64).sum::<f64>() / r,
            runs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub truth: Vec<f64>,
    pub replications: usize,
    pub paim: Option<AlgorithmSummary>,
    pub ipc: Option<AlgorithmSummary>,
    /// `100 (MSE_ipc - MSE_paim) / MSE_ipc`, when both ran.
    pub reduction_percent: Option<f64>,
}

pub fn reduction_percent(mse_ipc: f64, mse_paim: f64) -> f64 {
    100.0 * (mse_ipc - mse_paim) / mse_ipc
}

/// Report plus the full records of the first replication.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub report: SummaryReport,
    pub paim_record: Option<RunRecord>,
    pub ipc_record: Option<RunRecord>,
}

/// Configs for replication `rep`: one initialization shared by both
/// algorithms, same per-chain sampling streams.
pub fn replication_configs(config: &ExperimentConfig, rep: u64) -> Result<(u64, PaimConfig)> {
    let seed = replication_seed(config.base_seed, rep);
    let s = &config.sampler;
    let init = random_init(
        &config.init.box_lower,
        &config.init.box_upper,
        config.init.sigma,
        s.n_chains,
        &mut init_rng(seed),
    )?;
    Ok((
        seed,
        PaimConfig {
            n_chains: s.n_chains,
            samples: s.samples,
            t_train: s.t_train,
            t_stop: s.t_stop,
            epsilon: s.epsilon,
            activation_rule: s.activation_rule,
            init,
            seed,
            discard_burn_in: s.discard_burn_in,
            parallel: s.parallel,
        },
    ))
}

type RepOutput = (Option<(RunSummary, RunRecord)>, Option<(RunSummary, RunRecord)>);

fn run_replication(config: &ExperimentConfig, target: &dyn TargetDensity, rep: u64) -> Result<RepOutput> {
    let (seed, paim_cfg) = replication_configs(config, rep)?;
    let burn = config.sampler.discard_burn_in;
    let paim = if config.algorithm.runs_paim() {
        let rec = run_paim(&paim_cfg, target)?;
        Some((RunSummary::from_record(seed, &rec, burn), rec))
    } else {
        None
    };
    let ipc = if config.algorithm.runs_ipc() {
        let rec = run_ipc(&IpcConfig::from(&paim_cfg), target)?;
        Some((RunSummary::from_record(seed, &rec, burn), rec))
    } else {
        None
    };
    Ok((paim, ipc))
}

/// Runs all replications (in parallel across the rayon pool) and
/// aggregates the MSE of the per-run sample means against the truth.
pub fn replicate(config: &ExperimentConfig) -> Result<Experiment> {
    config.validate()?;
    let target = config.target.build()?;
    let truth = config
        .truth
        .as_ref()
        .ok_or(Error::TruthUnavailable)?
        .resolve(target.as_ref())?;
    replicate_with_truth(config, target.as_ref(), truth)
}

/// As [`replicate`] with an already resolved truth vector.
pub fn replicate_with_truth(
    config: &ExperimentConfig,
    target: &dyn TargetDensity,
    truth: Vec<f64>,
) -> Result<Experiment> {
    if config.replications == 0 {
        return Err(Error::InvalidConfig("replications must be at least 1".into()));
    }
    let outputs: Vec<RepOutput> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| run_replication(config, target, rep))
        .collect::<Result<_>>()?;

    let mut paim_runs = Vec::new();
    let mut ipc_runs = Vec::new();
    let mut paim_record = None;
    let mut ipc_record = None;
    for (i, (p, q)) in outputs.into_iter().enumerate() {
        if let Some((summary, rec)) = p {
            paim_runs.push(summary);
            if i == 0 {
                paim_record = Some(rec);
            }
        }
        if let Some((summary, rec)) = q {
            ipc_runs.push(summary);
            if i == 0 {
                ipc_record = Some(rec);
            }
        }
    }
    let paim = (!paim_runs.is_empty())
        .then(|| AlgorithmSummary::new(paim_runs, &truth))
        .transpose()?;
    let ipc = (!ipc_runs.is_empty())
        .then(|| AlgorithmSummary::new(ipc_runs, &truth))
        .transpose()?;
    let reduction = match (&paim, &ipc) {
        (Some(p), Some(q)) => Some(reduction_percent(q.mse, p.mse)),
        _ => None,
    };
    Ok(Experiment {
        report: SummaryReport {
            truth,
            replications: config.replications,
            paim,
            ipc,
            reduction_percent: reduction,
        },
        paim_record,
        ipc_record,
    })
}
