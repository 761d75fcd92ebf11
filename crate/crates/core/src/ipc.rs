//! Independent parallel chains with frozen proposals: the non-adaptive
//! baseline PAIM is compared against.

use serde::{Deserialize, Serialize};

use crate::chain::{mh_step, ChainState};
use crate::error::{Error, Result};
use crate::estimators::RunningMoments;
use crate::paim::{Initialization, PaimConfig};
use crate::record::{RunRecord, SampleRecord};
use crate::rng::chain_rng;
use crate::targets::TargetDensity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpcConfig {
    pub n_chains: usize,
    pub samples: usize,
    /// Only used for the reported global covariance.
    pub epsilon: f64,
    pub init: Initialization,
    pub seed: u64,
    #[serde(default)]
    pub discard_burn_in: bool,
}

impl From<&PaimConfig> for IpcConfig {
    fn from(c: &PaimConfig) -> Self {
        Self {
            n_chains: c.n_chains,
            samples: c.samples,
            epsilon: c.epsilon,
            init: c.init.clone(),
            seed: c.seed,
            discard_burn_in: c.discard_burn_in,
        }
    }
}

impl IpcConfig {
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
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.init.validate(self.n_chains)
    }

    /// `ceil(L/N)` per chain, filled in index order so the total is `L`.
    pub fn budgets(&self) -> Vec<u64> {
        let per = self.samples.div_ceil(self.n_chains);
        let mut left = self.samples;
        (0..self.n_chains)
            .map(|_| {
                let k = per.min(left);
                left -= k;
                k as u64
            })
            .collect()
    }
}

/// Runs every chain on its initial proposal for its fixed budget. Samples
/// are ordered step by step, chains ascending within a step.
pub fn run_ipc<T: TargetDensity + ?Sized>(config: &IpcConfig, target: &T) -> Result<RunRecord> {
    config.validate()?;
    let d = config.init.dim();
    if d != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            actual: d,
        });
    }
    let proposals = config.init.proposals()?;
    let budgets = config.budgets();
    let mut chains: Vec<(ChainState, _)> = config
        .init
        .states
        .iter()
        .enumerate()
        .map(|(i, x0)| (ChainState::new(i, x0.clone(), target), chain_rng(config.seed, i)))
        .collect();

    let steps = budgets.iter().copied().max().unwrap_or(0);
    let mut samples = Vec::with_capacity(config.samples);
    let mut activity = Vec::with_capacity(steps as usize);
    let mut global = RunningMoments::new(d);
    for t in 0..steps {
        let active: Vec<usize> = (0..config.n_chains).filter(|&n| t < budgets[n]).collect();
        for &n in &active {
            let (state, rng) = &mut chains[n];
            let out = mh_step(state, &proposals[n], target, rng);
            global.push(&state.current);
            samples.push(SampleRecord {
                t,
                chain: n,
                k: state.iterations,
                x: state.current.clone(),
                accepted: out.accepted,
            });
        }
        activity.push(active);
    }

    Ok(RunRecord {
        dim: d,
        n_chains: config.n_chains,
        samples,
        activity,
        budgets: chains.iter().map(|(s, _)| s.iterations).collect(),
        accepted: chains.iter().map(|(s, _)| s.accepted).collect(),
        t_tot: steps,
        proposals,
        global_mean: global.mean().to_vec(),
        global_covariance: global.covariance(config.epsilon)?,
        cluster_counts: vec![1; config.n_chains],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::CovarianceMatrix;
    use crate::paim::{run_paim, ActivationRule};
    use crate::targets::{make_gaussian_target, Banana, BananaParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn init(n: usize, seed: u64) -> Initialization {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |_| vec![rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0)];
        Initialization {
            states: (0..n).map(&mut draw).collect(),
            global_means: (0..n).map(&mut draw).collect(),
            local_means: (0..n).map(&mut draw).collect(),
            sigma: 10.0,
        }
    }

    fn ipc(n: usize, l: usize) -> IpcConfig {
        IpcConfig {
            n_chains: n,
            samples: l,
            epsilon: 0.4,
            init: init(n, 5),
            seed: 77,
            discard_burn_in: false,
        }
    }

    #[test]
    fn budget_split() {
        assert_eq!(ipc(4, 10).budgets(), vec![3, 3, 3, 1]);
        assert_eq!(ipc(5, 5000).budgets(), vec![1000; 5]);
        assert_eq!(ipc(6, 7).budgets(), vec![2, 2, 2, 1, 0, 0]);
        for (n, l) in [(3, 10), (7, 100), (9, 9)] {
            assert_eq!(ipc(n, l).budgets().iter().sum::<u64>(), l as u64);
        }
    }

    #[test]
    fn proposal_matching_target_always_accepts() {
        let target = make_gaussian_target(vec![0.0, 0.0], &CovarianceMatrix::scaled_identity(2, 4.0)).unwrap();
        let mut c = ipc(1, 2000);
        c.init.global_means = vec![vec![0.0, 0.0]];
        c.init.local_means = vec![vec![0.0, 0.0]];
        c.init.sigma = 2.0;
        let rec = run_ipc(&c, &target).unwrap();
        assert!(rec.samples.iter().all(|s| s.accepted));
    }

    #[test]
    fn proposals_stay_frozen() {
        let c = ipc(5, 500);
        let rec = run_ipc(&c, &Banana { params: BananaParams::default() }).unwrap();
        assert_eq!(rec.proposals, c.init.proposals().unwrap());
        assert_eq!(rec.len(), 500);
    }

    #[test]
    fn matches_paim_without_adaptation() {
        let c = ipc(5, 1000);
        let paim = PaimConfig {
            n_chains: 5,
            samples: 1000,
            t_train: 0,
            t_stop: Some(0),
            epsilon: 0.4,
            activation_rule: ActivationRule::Floor,
            init: c.init.clone(),
            seed: c.seed,
            discard_burn_in: false,
            parallel: false,
        };
        let target = Banana { params: BananaParams::default() };
        let a = run_ipc(&c, &target).unwrap();
        let b = run_paim(&paim, &target).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.budgets, b.budgets);
        assert_eq!(a.activity, b.activity);
    }

    #[test]
    fn chains_evolve_independently() {
        // each chain's rows equal a solo run on the same stream, so the pooled
        // multiset does not depend on chain order
        let target = Banana { params: BananaParams::default() };
        let c = ipc(3, 300);
        let base = run_ipc(&c, &target).unwrap();
        for n in 0..3 {
            let rows: Vec<Vec<f64>> = base
                .samples
                .iter()
                .filter(|s| s.chain == n)
                .map(|s| s.x.clone())
                .collect();
            assert_eq!(rows, solo_chain(&c, &target, n, 100));
        }
    }

    fn solo_chain<T: TargetDensity>(c: &IpcConfig, target: &T, n: usize, steps: usize) -> Vec<Vec<f64>> {
        let props = c.init.proposals().unwrap();
        let mut state = ChainState::new(n, c.init.states[n].clone(), target);
        let mut rng = chain_rng(c.seed, n);
        (0..steps)
            .map(|_| {
                mh_step(&mut state, &props[n], target, &mut rng);
                state.current.clone()
            })
            .collect()
    }
}
