//! Single-chain state and the independence Metropolis-Hastings step.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::proposal::MixtureProposal;
use crate::targets::TargetDensity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub index: usize,
    pub current: Vec<f64>,
    /// Cached `log π(current)`.
    pub current_log_target: f64,
    pub iterations: u64,
    pub accepted: u64,
    pub active: bool,
}

impl ChainState {
    pub fn new<T: TargetDensity + ?Sized>(index: usize, start: Vec<f64>, target: &T) -> Self {
        let current_log_target = sanitize(target.log_density(&start));
        Self {
            index,
            current: start,
            current_log_target,
            iterations: 0,
            accepted: 0,
            active: true,
        }
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Log of the independence-sampler acceptance probability
/// `min(1, π(x')ψ(x) / (π(x)ψ(x')))`.
///
/// Both targets at `-inf` counts as a certain accept so that chains started
/// outside the support can move.
pub fn log_acceptance(
    log_target_proposed: f64,
    log_target_current: f64,
    log_proposal_proposed: f64,
    log_proposal_current: f64,
) -> f64 {
    if log_target_current == f64::NEG_INFINITY {
        return 0.0;
    }
    if log_target_proposed == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let log_ratio =
        log_target_proposed + log_proposal_current - log_target_current - log_proposal_proposed;
    if log_ratio.is_nan() {
        // ∞ - ∞ from the proposal terms; refuse the move.
        return f64::NEG_INFINITY;
    }
    log_ratio.min(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub log_alpha: f64,
}

/// One MH iteration of `chain` against the proposal `psi`.
///
/// Consumes one uniform for the mixture coin, `d` normals for the draw and
/// one uniform for the accept test.
pub fn mh_step<T, R>(chain: &mut ChainState, psi: &MixtureProposal, target: &T, rng: &mut R) -> StepOutcome
where
    T: TargetDensity + ?Sized,
    R: Rng + ?Sized,
{
    let proposed = psi.sample(rng);
    let log_target_proposed = sanitize(target.log_density(&proposed));
    let log_alpha = log_acceptance(
        log_target_proposed,
        chain.current_log_target,
        psi.log_pdf(&proposed),
        psi.log_pdf(&chain.current),
    );
    let u: f64 = rng.random();
    // u is in [0, 1), so log_alpha == 0 always accepts and -inf never does.
    let accepted = u.ln() < log_alpha;
    if accepted {
        chain.current = proposed;
        chain.current_log_target = log_target_proposed;
        chain.accepted += 1;
    }
    chain.iterations += 1;
    StepOutcome {
        accepted,
        log_alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::CovarianceMatrix;
    use crate::proposal::GaussianComponent;
    use crate::targets::make_gaussian_target;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn acceptance_examples() {
        let ln2 = std::f64::consts::LN_2;
        // target ratio 2, equal proposal → clipped to 1
        assert_eq!(log_acceptance(ln2, 0.0, -1.0, -1.0), 0.0);
        // target ratio ½
        assert_abs_diff_eq!(log_acceptance(-ln2, 0.0, -1.0, -1.0).exp(), 0.5, epsilon = 1e-15);
        // equal targets, ψ(x_cur)=1, ψ(x')=2
        assert_abs_diff_eq!(log_acceptance(0.0, 0.0, ln2, 0.0).exp(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn acceptance_handles_infinite_targets() {
        let ninf = f64::NEG_INFINITY;
        assert_eq!(log_acceptance(ninf, ninf, 0.0, 0.0), 0.0);
        assert_eq!(log_acceptance(-3.0, ninf, 0.0, 0.0), 0.0);
        assert_eq!(log_acceptance(ninf, -3.0, 0.0, 0.0), ninf);
    }

    #[test]
    fn proposal_equal_to_target_always_accepts() {
        let cov = CovarianceMatrix::diagonal(&[2.0, 0.5]);
        let target = make_gaussian_target(vec![1.0, -1.0], &cov).unwrap();
        let comp = GaussianComponent::new(vec![1.0, -1.0], cov).unwrap();
        let psi = MixtureProposal::new(comp.clone(), comp).unwrap();
        let mut chain = ChainState::new(0, vec![4.0, 4.0], &target);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let out = mh_step(&mut chain, &psi, &target, &mut rng);
            assert!(out.accepted);
            assert!(out.log_alpha.abs() < 1e-12);
        }
        assert_eq!(chain.iterations, 1000);
        assert_eq!(chain.accepted, 1000);
    }

    #[test]
    fn rejection_keeps_state() {
        // target concentrated far from the proposal: almost every move rejected
        let target = make_gaussian_target(vec![0.0, 0.0], &CovarianceMatrix::scaled_identity(2, 1e-4)).unwrap();
        let comp = GaussianComponent::new(vec![50.0, 50.0], CovarianceMatrix::identity(2)).unwrap();
        let psi = MixtureProposal::new(comp.clone(), comp).unwrap();
        let mut chain = ChainState::new(0, vec![0.0, 0.0], &target);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = mh_step(&mut chain, &psi, &target, &mut rng);
        assert!(!out.accepted);
        assert_eq!(chain.current, vec![0.0, 0.0]);
        assert_eq!(chain.iterations, 1);
    }

    proptest! {
        #[test]
        fn alpha_in_unit_interval(
            a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3, d in -1e3f64..1e3,
        ) {
            let alpha = log_acceptance(a, b, c, d).exp();
            prop_assert!((0.0..=1.0).contains(&alpha));
        }
    }
}
