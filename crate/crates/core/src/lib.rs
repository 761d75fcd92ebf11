//! Parallel adaptive independent Metropolis (PAIM).
//!
//! A population of independence Metropolis-Hastings chains whose Gaussian
//! mixture proposals are adapted cooperatively: one component per chain is
//! fit to every sample drawn so far, the other to the samples nearest that
//! chain's local mean. Chains whose clusters attract too few samples are
//! switched off, so the sample budget flows to the chains that cover the
//! target's mass.
//!
//! The crate also carries the non-adaptive baseline ([`ipc`]), benchmark
//! targets with a grid oracle ([`targets`]) and the replication harness
//! ([`harness`]) used by the `paim` binary.

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod error;
pub mod estimators;
pub mod gaussian;
pub mod harness;
pub mod ipc;
pub mod paim;
pub mod proposal;
pub mod record;
pub mod rng;
pub mod targets;

pub use chain::{log_acceptance, mh_step, ChainState, StepOutcome};
pub use error::{Error, Result};
pub use estimators::{mse, RunningMoments};
pub use gaussian::{cholesky, log_gaussian_pdf, regularize, sample_gaussian, CholeskyFactor, CovarianceMatrix};
pub use harness::{replicate, ExperimentConfig, SummaryReport};
pub use ipc::{run_ipc, IpcConfig};
pub use paim::{activation, adapt, assign, run_paim, run_paim_observed, ActivationRule, Initialization, PaimConfig};
pub use proposal::{GaussianComponent, MixtureProposal};
pub use record::{RunRecord, SampleRecord};
pub use targets::{grid_expectation, log_banana, make_gaussian_target, Banana, BananaParams, TargetDensity, TargetSpec};
