//! Running mean/scatter accumulators and the MSE used for reporting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{regularize, CovarianceMatrix};

/// Welford-style accumulator of the count, mean and scatter
/// `Σ (x_i - mean)(x_i - mean)ᵀ` of a stream of d-vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningMoments {
    dim: usize,
    count: u64,
    mean: Vec<f64>,
    scatter: Vec<f64>,
}

impl RunningMoments {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            count: 0,
            mean: vec![0.0; dim],
            scatter: vec![0.0; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Row-major `d x d` scatter matrix.
    pub fn scatter(&self) -> &[f64] {
        &self.scatter
    }

    pub fn push(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.dim, "pushed vector has wrong dimension");
        self.count += 1;
        let n = self.count as f64;
        let d = self.dim;
        let before: Vec<f64> = x.iter().zip(&self.mean).map(|(xi, mi)| xi - mi).collect();
        for (m, delta) in self.mean.iter_mut().zip(&before) {
            *m += delta / n;
        }
        let after: Vec<f64> = x.iter().zip(&self.mean).map(|(xi, mi)| xi - mi).collect();
        // S += (x - old_mean)(x - new_mean)ᵀ, symmetrised by filling the lower
        // triangle from the upper one.
        for i in 0..d {
            for j in i..d {
                let inc = 0.5 * (before[i] * after[j] + before[j] * after[i]);
                self.scatter[i * d + j] += inc;
                if i != j {
                    self.scatter[j * d + i] = self.scatter[i * d + j];
                }
            }
        }
    }

    /// Sample covariance plus `epsilon * I`; with fewer than two points the
    /// scatter carries no information and the result is `epsilon * I`.
    pub fn covariance(&self, epsilon: f64) -> Result<CovarianceMatrix> {
        if self.count < 2 {
            return regularize(self.dim, &vec![0.0; self.dim * self.dim], epsilon);
        }
        let denom = (self.count - 1) as f64;
        let sample: Vec<f64> = self.scatter.iter().map(|s| s / denom).collect();
        regularize(self.dim, &sample, epsilon)
    }
}

/// `(1/R) Σ_r (1/d) ‖estimate_r - truth‖²`.
pub fn mse(estimates: &[Vec<f64>], truth: &[f64]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::Empty("estimates"));
    }
    let d = truth.len();
    let mut total = 0.0;
    for e in estimates {
        if e.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: e.len(),
            });
        }
        total += e.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / d as f64;
    }
    Ok(total / estimates.len() as f64)
}
