//! Target densities and a deterministic grid oracle for their means.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{cholesky, log_gaussian_pdf, CholeskyFactor, CovarianceMatrix};

/// An unnormalized log density over ℝ^d.
///
/// Implementations must return a finite value or `-inf`, never NaN.
pub trait TargetDensity: Send + Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, x: &[f64]) -> f64;
}

impl<T: TargetDensity + ?Sized> TargetDensity for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
}

impl<T: TargetDensity + ?Sized> TargetDensity for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BananaParams {
    #[serde(rename = "B")]
    pub b: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl Default for BananaParams {
    fn default() -> Self {
        Self {
            b: 10.0,
            eta1: 4.0,
            eta2: 5.0,
            eta3: 5.0,
        }
    }
}

impl BananaParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta1 > 0.0 && self.eta2 > 0.0 && self.eta3 > 0.0) || !self.b.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "banana parameters need finite B and positive eta, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Log of the banana-shaped density
/// `exp(-(4 - B x1 - x2²)²/(2η1²) - x1²/(2η2²) - x2²/(2η3²))`.
pub fn log_banana(x: &[f64], p: &BananaParams) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let ridge = 4.0 - p.b * x1 - x2 * x2;
    -ridge * ridge / (2.0 * p.eta1 * p.eta1)
        - x1 * x1 / (2.0 * p.eta2 * p.eta2)
        - x2 * x2 / (2.0 * p.eta3 * p.eta3)
}

#[derive(Debug, Clone)]
pub struct Banana {
    pub params: BananaParams,
}

impl TargetDensity for Banana {
    fn dim(&self) -> usize {
        2
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        log_banana(x, &self.params)
    }
}

#[derive(Debug, Clone)]
pub struct GaussianTarget {
    mean: Vec<f64>,
    factor: CholeskyFactor,
}

impl GaussianTarget {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }
}

impl TargetDensity for GaussianTarget {
    fn dim(&self) -> usize {
        self.mean.len()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        log_gaussian_pdf(x, &self.mean, &self.factor)
    }
}

pub fn make_gaussian_target(mean: Vec<f64>, cov: &CovarianceMatrix) -> Result<GaussianTarget> {
    if mean.len() != cov.dim() {
        return Err(Error::DimensionMismatch {
            expected: cov.dim(),
            actual: mean.len(),
        });
    }
    let factor = cholesky(cov)?;
    Ok(GaussianTarget { mean, factor })
}

/// Finite mixture of Gaussian targets with fixed weights.
#[derive(Debug, Clone)]
pub struct GaussianMixtureTarget {
    components: Vec<GaussianTarget>,
    log_weights: Vec<f64>,
}

impl GaussianMixtureTarget {
    pub fn new(components: Vec<GaussianTarget>, weights: &[f64]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Empty("mixture components"));
        }
        if weights.len() != components.len() {
            return Err(Error::DimensionMismatch {
                expected: components.len(),
                actual: weights.len(),
            });
        }
        let dim = components[0].dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.dim(),
            });
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w > 0.0)) || !total.is_finite() {
            return Err(Error::InvalidConfig("mixture weights must be positive".into()));
        }
        let log_weights = weights.iter().map(|w| (w / total).ln()).collect();
        Ok(Self {
            components,
            log_weights,
        })
    }
}

impl TargetDensity for GaussianMixtureTarget {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .components
            .iter()
            .zip(&self.log_weights)
            .map(|(c, lw)| lw + c.log_density(x))
            .collect();
        log_sum_exp(&terms)
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Target selection as it appears in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    Banana(BananaParams),
    Gaussian {
        mean: Vec<f64>,
        covariance: Vec<Vec<f64>>,
    },
    GaussianMixture {
        components: Vec<MixtureComponentSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponentSpec {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

impl TargetSpec {
    pub fn build(&self) -> Result<Box<dyn TargetDensity>> {
        Ok(match self {
            TargetSpec::Banana(p) => {
                p.validate()?;
                Box::new(Banana { params: *p })
            }
            TargetSpec::Gaussian { mean, covariance } => Box::new(make_gaussian_target(
                mean.clone(),
                &CovarianceMatrix::from_rows(covariance)?,
            )?),
            TargetSpec::GaussianMixture { components } => {
                let parts = components
                    .iter()
                    .map(|c| make_gaussian_target(c.mean.clone(), &CovarianceMatrix::from_rows(&c.covariance)?))
                    .collect::<Result<Vec<_>>>()?;
                let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
                Box::new(GaussianMixtureTarget::new(parts, &weights)?)
            }
        })
    }
}

/// Self-normalized mean of `target` over a tensor grid of cell midpoints.
///
/// Weights are `exp(log π - max log π)`, so only ratios matter.
pub fn grid_expectation(
    target: &dyn TargetDensity,
    lower: &[f64],
    upper: &[f64],
    points_per_axis: usize,
) -> Result<Vec<f64>> {
    let d = target.dim();
    if d == 0 || d > 3 {
        return Err(Error::InvalidConfig(format!("grid oracle supports 1 <= d <= 3, got {d}")));
    }
    for bound in [lower, upper] {
        if bound.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bound.len(),
            });
        }
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
        return Err(Error::InvalidConfig("grid bounds need lower < upper on every axis".into()));
    }
    if points_per_axis < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points per axis".into()));
    }

    let axes: Vec<Vec<f64>> = (0..d)
        .map(|k| {
            let h = (upper[k] - lower[k]) / points_per_axis as f64;
            (0..points_per_axis)
                .map(|i| lower[k] + (i as f64 + 0.5) * h)
                .collect()
        })
        .collect();
    let total = points_per_axis.pow(d as u32);
    let point = |mut flat: usize, buf: &mut [f64]| {
        for k in (0..d).rev() {
            buf[k] = axes[k][flat % points_per_axis];
            flat /= points_per_axis;
        }
    };

    let mut buf = vec![0.0; d];
    let mut log_w = Vec::with_capacity(total);
    let mut max = f64::NEG_INFINITY;
    for flat in 0..total {
        point(flat, &mut buf);
        let lw = target.log_density(&buf);
        if lw > max {
            max = lw;
        }
        log_w.push(lw);
    }
    if max == f64::NEG_INFINITY {
        return Err(Error::AllZeroMass);
    }

    let mut mass = 0.0;
    let mut moment = vec![0.0; d];
    for (flat, lw) in log_w.into_iter().enumerate() {
        let w = (lw - max).exp();
        if w == 0.0 {
            continue;
        }
        point(flat, &mut buf);
        mass += w;
        for (m, x) in moment.iter_mut().zip(&buf) {
            *m += w * x;
        }
    }
    if !(mass > 0.0) {
        return Err(Error::AllZeroMass);
    }
    Ok(moment.into_iter().map(|m| m / mass).collect())
}
