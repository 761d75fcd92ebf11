use serde::{Deserialize, Serialize};

use crate::gaussian::CovarianceMatrix;
use crate::proposal::MixtureProposal;

/// One MH iteration as it lands in the global sample list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Scheduler step that produced the sample.
    pub t: u64,
    pub chain: usize,
    /// Chain iteration count after this sample (1-based).
    pub k: u64,
    pub x: Vec<f64>,
    pub accepted: bool,
}

/// Everything a run produces: the ordered samples `θ_1..θ_L`, the per-step
/// active sets, per-chain budgets and the final proposal parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dim: usize,
    pub n_chains: usize,
    pub samples: Vec<SampleRecord>,
    /// Active chain indices at each executed step, ascending.
    pub activity: Vec<Vec<usize>>,
    /// Final iteration count `K_n` of each chain.
    pub budgets: Vec<u64>,
    pub accepted: Vec<u64>,
    /// Number of steps executed.
    pub t_tot: u64,
    pub proposals: Vec<MixtureProposal>,
    pub global_mean: Vec<f64>,
    pub global_covariance: CovarianceMatrix,
    /// Cluster counts `m_n` at the end of the run.
    pub cluster_counts: Vec<u64>,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn theta(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(|s| s.x.as_slice())
    }

    /// Active set of the last executed step.
    pub fn final_active(&self) -> &[usize] {
        self.activity.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn acceptance_rate(&self) -> f64 {
        let acc: u64 = self.accepted.iter().sum();
        let total: u64 = self.budgets.iter().sum();
        if total == 0 {
            0.0
        } else {
            acc as f64 / total as f64
        }
    }

    /// Sample mean of the returned states. With `discard_burn_in`, each
    /// chain's first `ceil(K_n / 5)` samples are left out.
    pub fn estimate(&self, discard_burn_in: bool) -> Vec<f64> {
        let mut sum = vec![0.0; self.dim];
        let mut count = 0usize;
        for s in &self.samples {
            if discard_burn_in && s.k <= self.budgets[s.chain].div_ceil(5) {
                continue;
            }
            for (acc, v) in sum.iter_mut().zip(&s.x) {
                *acc += v;
            }
            count += 1;
        }
        if count == 0 {
            return vec![f64::NAN; self.dim];
        }
        sum.into_iter().map(|v| v / count as f64).collect()
    }
}
