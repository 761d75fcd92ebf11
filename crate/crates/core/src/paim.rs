//! Parallel adaptive independent Metropolis.
//!
//! `N` independence-MH chains run in bulk-synchronous steps. Each chain
//! proposes from `ψ_n = ½ q_global + ½ q_local`. Fresh states are assigned to
//! the chain with the nearest local mean; after the training phase every
//! global component is refit to all samples, every local component to its
//! cluster, and chains whose share of assigned states rounds to zero sit out
//! the next step.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{mh_step, ChainState};
use crate::error::{Error, Result};
use crate::estimators::RunningMoments;
use crate::gaussian::CovarianceMatrix;
use crate::proposal::{GaussianComponent, MixtureProposal};
use crate::record::{RunRecord, SampleRecord};
use crate::rng::chain_rng;
use crate::targets::TargetDensity;

/// Integer rounding applied to `N m_n / Σ m_j` when deciding activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationRule {
    /// Deactivates chains whose share is below `1/N`.
    #[default]
    Floor,
    /// Literal ceiling; never deactivates a chain with a positive count.
    Ceil,
}

/// Initial states, component means and the common initial spread `σ`
/// (every initial covariance is `σ² I`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Initialization {
    pub states: Vec<Vec<f64>>,
    pub global_means: Vec<Vec<f64>>,
    pub local_means: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl Initialization {
    pub fn n_chains(&self) -> usize {
        self.states.len()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub(crate) fn validate(&self, n_chains: usize) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::InvalidConfig("initial states are empty".into()));
        }
        for (name, rows) in [
            ("states", &self.states),
            ("global_means", &self.global_means),
            ("local_means", &self.local_means),
        ] {
            if rows.len() != n_chains {
                return Err(Error::InvalidConfig(format!(
                    "{name} has {} rows, expected {n_chains}",
                    rows.len()
                )));
            }
            if let Some(bad) = rows.iter().find(|r| r.len() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: bad.len(),
                });
            }
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    pub(crate) fn proposals(&self) -> Result<Vec<MixtureProposal>> {
        let cov = CovarianceMatrix::scaled_identity(self.dim(), self.sigma * self.sigma);
        self.global_means
            .iter()
            .zip(&self.local_means)
            .map(|(g, l)| {
                MixtureProposal::new(
                    GaussianComponent::new(g.clone(), cov.clone())?,
                    GaussianComponent::new(l.clone(), cov.clone())?,
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaimConfig {
    pub n_chains: usize,
    /// Total sample budget `L`.
    pub samples: usize,
    pub t_train: u64,
    /// Adaptation horizon; `None` never stops. `Some(0)` disables
    /// assignment and adaptation entirely.
    pub t_stop: Option<u64>,
    pub epsilon: f64,
    #[serde(default)]
    pub activation_rule: ActivationRule,
    pub init: Initialization,
    pub seed: u64,
    #[serde(default)]
    pub discard_burn_in: bool,
    /// Run the chains of a step on the rayon pool. Output is identical to
    /// serial execution.
    #[serde(default)]
    pub parallel: bool,
}

impl PaimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_chains == 0 {
            return Err(Error::InvalidConfig("need at least one chain".into()));
        }
        if self.samples < self.n_chains {
            return Err(Error::InvalidConfig(format!(
                "sample budget L={} is smaller than N={}",
                self.samples, self.n_chains
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        match self.t_stop {
            Some(0) | None => {}
            Some(stop) if self.t_train < stop => {}
            Some(stop) => {
                return Err(Error::InvalidConfig(format!(
                    "T_train ({}) must be below T_stop ({stop})",
                    self.t_train
                )))
            }
        }
        self.init.validate(self.n_chains)
    }

    fn before_stop(&self, t: u64) -> bool {
        self.t_stop.is_none_or(|stop| t < stop)
    }

    fn adapts_at(&self, t: u64) -> bool {
        t > self.t_train && self.before_stop(t)
    }
}

/// Chains whose rounded share `N m_n / Σ m_j` is positive.
pub fn activation(counts: &[u64], rule: ActivationRule) -> Vec<usize> {
    let n = counts.len() as u128;
    let total: u128 = counts.iter().map(|&m| m as u128).sum();
    assert!(total > 0, "activation needs at least one assigned state");
    counts
        .iter()
        .enumerate()
        .filter(|(_, &m)| {
            let num = n * m as u128;
            let share = match rule {
                ActivationRule::Floor => num / total,
                ActivationRule::Ceil => num.div_ceil(total),
            };
            share > 0
        })
        .map(|(i, _)| i)
        .collect()
}

/// Index of the Euclidean-nearest mean; ties go to the lowest index.
pub fn nearest(means: &[Vec<f64>], z: &[f64]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, m) in means.iter().enumerate() {
        let dist: f64 = m.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
        if dist < best_dist {
            best = i;
            best_dist = dist;
        }
    }
    best
}

/// Pushes every fresh state into the cluster of its nearest local mean.
pub fn assign(fresh: &[Vec<f64>], local_means: &[Vec<f64>], clusters: &mut [RunningMoments]) {
    debug_assert_eq!(local_means.len(), clusters.len());
    for z in fresh {
        let n = nearest(local_means, z);
        clusters[n].push(z);
    }
}

/// Refits every proposal: the global component to all samples so far, the
/// local component to the chain's cluster.
pub fn adapt(
    global: &RunningMoments,
    clusters: &[RunningMoments],
    epsilon: f64,
) -> Result<Vec<MixtureProposal>> {
    let global_cov = global.covariance(epsilon)?;
    let shared = GaussianComponent::new(global.mean().to_vec(), global_cov)?;
    clusters
        .iter()
        .map(|c| {
            let local = GaussianComponent::new(c.mean().to_vec(), c.covariance(epsilon)?)?;
            MixtureProposal::new(shared.clone(), local)
        })
        .collect()
}

/// State visible to an observer after each completed step.
#[derive(Debug)]
pub struct StepSnapshot<'a> {
    pub t: u64,
    /// Samples produced so far (`ℓ`).
    pub ell: usize,
    /// Chains that ran during this step.
    pub active: &'a [usize],
    /// States generated during this step, in chain order.
    pub fresh: &'a [Vec<f64>],
    pub clusters: &'a [RunningMoments],
    pub global: &'a RunningMoments,
    pub proposals: &'a [MixtureProposal],
    /// Active set for the next step.
    pub next_active: &'a [usize],
    pub adapted: bool,
    /// States generated at steps before `T_stop`, this one included.
    pub assigned_total: usize,
}

struct Runner {
    state: ChainState,
    rng: ChaCha8Rng,
}

/// Runs PAIM to completion and returns exactly `L` samples.
pub fn run_paim<T: TargetDensity + ?Sized>(config: &PaimConfig, target: &T) -> Result<RunRecord> {
    run_paim_observed(config, target, |_| {})
}

/// As [`run_paim`], calling `observer` after every completed step.
pub fn run_paim_observed<T, F>(config: &PaimConfig, target: &T, mut observer: F) -> Result<RunRecord>
where
    T: TargetDensity + ?Sized,
    F: FnMut(&StepSnapshot<'_>),
{
    config.validate()?;
    let n = config.n_chains;
    let d = config.init.dim();
    if d != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: d,
        });
    }
    let budget = config.samples;

    let mut proposals = config.init.proposals()?;
    let mut runners: Vec<Runner> = config
        .init
        .states
        .iter()
        .enumerate()
        .map(|(i, x0)| Runner {
            state: ChainState::new(i, x0.clone(), target),
            rng: chain_rng(config.seed, i),
        })
        .collect();
    // Each initial state seeds its own cluster, so m_n starts at 1.
    let mut clusters: Vec<RunningMoments> = config
        .init
        .states
        .iter()
        .map(|x0| {
            let mut acc = RunningMoments::new(d);
            acc.push(x0);
            acc
        })
        .collect();
    let mut global = RunningMoments::new(d);
    let mut next_active: Vec<usize> = (0..n).collect();
    let mut samples: Vec<SampleRecord> = Vec::with_capacity(budget);
    let mut activity: Vec<Vec<usize>> = Vec::new();
    let mut assigned_total = 0usize;

    let mut t: u64 = 0;
    loop {
        let active: Vec<usize> = if t <= config.t_train {
            (0..n).collect()
        } else {
            next_active.clone()
        };
        for r in runners.iter_mut() {
            r.state.active = false;
        }
        for &j in &active {
            runners[j].state.active = true;
        }

        // Only the chains that fit in the remaining budget run; the rest of
        // the active set would come after the stop point.
        let remaining = budget - samples.len();
        let running: Vec<usize> = active.iter().copied().take(remaining).collect();
        let accepted = step_chains(&mut runners, &running, &proposals, target, config.parallel);

        let mut fresh = Vec::with_capacity(running.len());
        for (&j, acc) in running.iter().zip(accepted) {
            let st = &runners[j].state;
            samples.push(SampleRecord {
                t,
                chain: j,
                k: st.iterations,
                x: st.current.clone(),
                accepted: acc,
            });
            fresh.push(st.current.clone());
        }
        activity.push(active);

        if samples.len() >= budget {
            break;
        }

        let mut adapted = false;
        if config.before_stop(t) {
            for z in &fresh {
                global.push(z);
            }
            assigned_total += fresh.len();
            let local_means: Vec<Vec<f64>> = proposals.iter().map(|p| p.local.mean().to_vec()).collect();
            assign(&fresh, &local_means, &mut clusters);
        }
        if config.adapts_at(t) {
            proposals = adapt(&global, &clusters, config.epsilon)?;
            let counts: Vec<u64> = clusters.iter().map(RunningMoments::count).collect();
            next_active = activation(&counts, config.activation_rule);
            if next_active.is_empty() {
                // Unreachable for either rounding rule; keep the largest cluster running.
                let best = (0..n).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).unwrap_or(0);
                next_active.push(best);
            }
            adapted = true;
        }

        observer(&StepSnapshot {
            t,
            ell: samples.len(),
            active: activity.last().map(Vec::as_slice).unwrap_or(&[]),
            fresh: &fresh,
            clusters: &clusters,
            global: &global,
            proposals: &proposals,
            next_active: &next_active,
            adapted,
            assigned_total,
        });
        t += 1;
    }

    let global_covariance = global.covariance(config.epsilon)?;
    Ok(RunRecord {
        dim: d,
        n_chains: n,
        budgets: runners.iter().map(|r| r.state.iterations).collect(),
        accepted: runners.iter().map(|r| r.state.accepted).collect(),
        t_tot: activity.len() as u64,
        samples,
        activity,
        proposals,
        global_mean: global.mean().to_vec(),
        global_covariance,
        cluster_counts: clusters.iter().map(RunningMoments::count).collect(),
    })
}

/// Advances each listed chain by one MH iteration and returns the accept
/// flags in the same order.
fn step_chains<T: TargetDensity + ?Sized>(
    runners: &mut [Runner],
    running: &[usize],
    proposals: &[MixtureProposal],
    target: &T,
    parallel: bool,
) -> Vec<bool> {
    let mut selected: Vec<&mut Runner> = Vec::with_capacity(running.len());
    let mut wanted = running.iter().peekable();
    for (i, r) in runners.iter_mut().enumerate() {
        if wanted.peek() == Some(&&i) {
            selected.push(r);
            wanted.next();
        }
    }
    let step = |r: &mut &mut Runner| {
        let i = r.state.index;
        mh_step(&mut r.state, &proposals[i], target, &mut r.rng).accepted
    };
    if parallel {
        selected.par_iter_mut().map(step).collect()
    } else {
        selected.iter_mut().map(step).collect()
    }
}
