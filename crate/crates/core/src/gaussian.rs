//! Dense symmetric positive-definite algebra and multivariate normal
//! sampling/density evaluation for the proposal components.
//!
//! Matrices are stored row-major in a flat `Vec<f64>`. Dimensions are small
//! (the benchmark target is 2-D), so everything is plain loops.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for `a[i][j] == a[j][i]`.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest pivot accepted by [`cholesky`].
pub const PIVOT_FLOOR: f64 = 1e-300;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A symmetric positive-definite `d x d` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    /// Builds a matrix from row-major entries, checking shape and symmetry.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        check_symmetric(dim, &entries)?;
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_major(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = scale;
        }
        Self { dim, entries }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * dim + i] = v;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
    /// Sum of the logs of the diagonal of `L`, i.e. `½ log det C`.
    log_det_half: f64,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.lower[row * self.dim + col]
    }

    pub fn log_det_half(&self) -> f64 {
        self.log_det_half
    }

    /// Reconstructs `L Lᵀ`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                out[i * d + j] = s;
                out[j * d + i] = s;
            }
        }
        out
    }

    /// Solves `L y = b` by forward substitution.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut y = vec![0.0; d];
        for i in 0..d {
            let row = &self.lower[i * d..i * d + i];
            let s = b[i] - row.iter().zip(&y[..i]).map(|(l, v)| l * v).sum::<f64>();
            y[i] = s / self.lower[i * d + i];
        }
        y
    }

    /// Computes `mean + L z`.
    pub fn affine(&self, mean: &[f64], z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| mean[i] + (0..=i).map(|k| self.lower[i * d + k] * z[k]).sum::<f64>())
            .collect()
    }
}

fn check_symmetric(dim: usize, entries: &[f64]) -> Result<()> {
    for i in 0..dim {
        for j in (i + 1)..dim {
            let gap = (entries[i * dim + j] - entries[j * dim + i]).abs();
            if gap > SYMMETRY_TOL || gap.is_nan() {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }
    Ok(())
}

/// Returns `scatter + epsilon * I`. The input is the row-major `d x d`
/// scatter (or any symmetric PSD matrix).
pub fn regularize(dim: usize, scatter: &[f64], epsilon: f64) -> Result<CovarianceMatrix> {
    if scatter.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            actual: scatter.len(),
        });
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
    }
    check_symmetric(dim, scatter)?;
    let mut entries = scatter.to_vec();
    for i in 0..dim {
        entries[i * dim + i] += epsilon;
    }
    // Mirror the upper triangle so the result is exactly symmetric.
    for i in 0..dim {
        for j in (i + 1)..dim {
            entries[j * dim + i] = entries[i * dim + j];
        }
    }
    Ok(CovarianceMatrix { dim, entries })
}

pub fn cholesky(c: &CovarianceMatrix) -> Result<CholeskyFactor> {
    let d = c.dim;
    let mut lower = vec![0.0; d * d];
    let mut log_det_half = 0.0;
    for j in 0..d {
        let mut pivot = c.get(j, j);
        for k in 0..j {
            pivot -= lower[j * d + k] * lower[j * d + k];
        }
        if !(pivot > PIVOT_FLOOR) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let diag = pivot.sqrt();
        lower[j * d + j] = diag;
        log_det_half += diag.ln();
        for i in (j + 1)..d {
            let mut s = c.get(i, j);
            for k in 0..j {
                s -= lower[i * d + k] * lower[j * d + k];
            }
            lower[i * d + j] = s / diag;
        }
    }
    Ok(CholeskyFactor {
        dim: d,
        lower,
        log_det_half,
    })
}

/// Draws from `N(mean, L Lᵀ)` using exactly `d` standard normal variates.
pub fn sample_gaussian<R: Rng + ?Sized>(
    mean: &[f64],
    factor: &CholeskyFactor,
    rng: &mut R,
) -> Vec<f64> {
    debug_assert_eq!(mean.len(), factor.dim);
    let z: Vec<f64> = (0..factor.dim).map(|_| rng.sample(StandardNormal)).collect();
    factor.affine(mean, &z)
}

pub fn log_gaussian_pdf(x: &[f64], mean: &[f64], factor: &CholeskyFactor) -> f64 {
    let d = factor.dim;
    debug_assert_eq!(x.len(), d);
    debug_assert_eq!(mean.len(), d);
    let diff: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let y = factor.solve_lower(&diff);
    let quad: f64 = y.iter().map(|v| v * v).sum();
    -0.5 * d as f64 * LN_2PI - factor.log_det_half - 0.5 * quad
}
