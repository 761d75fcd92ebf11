//! Equal-weight two-component Gaussian mixture proposals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{cholesky, log_gaussian_pdf, CholeskyFactor, CovarianceMatrix};

const LN_HALF: f64 = -std::f64::consts::LN_2;

/// One Gaussian component with its cached Cholesky factor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianComponent {
    mean: Vec<f64>,
    covariance: CovarianceMatrix,
    #[serde(skip_serializing)]
    factor: CholeskyFactor,
}

impl GaussianComponent {
    pub fn new(mean: Vec<f64>, covariance: CovarianceMatrix) -> Result<Self> {
        if mean.len() != covariance.dim() {
            return Err(Error::DimensionMismatch {
                expected: covariance.dim(),
                actual: mean.len(),
            });
        }
        let factor = cholesky(&covariance)?;
        Ok(Self {
            mean,
            covariance,
            factor,
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.covariance
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        log_gaussian_pdf(x, &self.mean, &self.factor)
    }

    fn sample_from_noise(&self, z: &[f64]) -> Vec<f64> {
        self.factor.affine(&self.mean, z)
    }
}

/// `ψ = ½ q_global + ½ q_local`.
///
/// The global component tracks all generated states; the local one tracks
/// the states assigned to this chain's cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureProposal {
    pub global: GaussianComponent,
    pub local: GaussianComponent,
}

/// Which component a mixture draw came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Global,
    Local,
}

impl MixtureProposal {
    pub fn new(global: GaussianComponent, local: GaussianComponent) -> Result<Self> {
        if global.mean.len() != local.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: global.mean.len(),
                actual: local.mean.len(),
            });
        }
        Ok(Self { global, local })
    }

    pub fn dim(&self) -> usize {
        self.global.mean.len()
    }

    pub fn log_pdf(&self, x: &[f64]) -> f64 {
        let a = self.global.log_pdf(x);
        let b = self.local.log_pdf(x);
        let max = a.max(b);
        if max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        LN_HALF + max + ((a - max).exp() + (b - max).exp()).ln()
    }

    /// Fair coin (one uniform) then `d` normals from the chosen component.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let which = if rng.random::<f64>() < 0.5 {
            Component::Global
        } else {
            Component::Local
        };
        let z: Vec<f64> = (0..self.dim())
            .map(|_| rng.sample(rand_distr::StandardNormal))
            .collect();
        self.sample_with(which, &z)
    }

    pub fn sample_with(&self, which: Component, z: &[f64]) -> Vec<f64> {
        match which {
            Component::Global => self.global.sample_from_noise(z),
            Component::Local => self.local.sample_from_noise(z),
        }
    }
}

/// Serialized form of a component; the factor is rebuilt on load.
#[derive(Deserialize)]
struct ComponentRepr {
    mean: Vec<f64>,
    covariance: CovarianceMatrix,
}

impl<'de> Deserialize<'de> for GaussianComponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ComponentRepr::deserialize(d)?;
        GaussianComponent::new(repr.mean, repr.covariance).map_err(serde::de::Error::custom)
    }
}
