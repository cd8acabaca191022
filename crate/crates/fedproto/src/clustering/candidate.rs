//! Candidate center selection over randomly shifted grids.

use rand::Rng;

use crate::clustering::{
    private_partition, CandidateSet, ClusteringParams, CubeNode, ProjectedData,
};
use crate::core::{Epsilon, PrivacyLedger, RngStream};
use crate::error::{Error, Result};

/// Union of [`private_partition`] outputs over T shifted root cubes, each run
/// at (ε/T, δ/T). T defaults to ceil(25·k·ln(n/δ)). Every partition run is
/// recorded on the ledger.
#[allow(clippy::too_many_arguments)]
pub fn candidate_set(
    y: &ProjectedData,
    k: usize,
    epsilon: Epsilon,
    delta: f64,
    lambda_bound: f64,
    params: &ClusteringParams,
    ledger: &mut PrivacyLedger,
    rng: &RngStream,
) -> Result<CandidateSet> {
    if lambda_bound <= 0.0 || !lambda_bound.is_finite() {
        return Err(Error::parameter(format!(
            "Λ must be finite and positive, got {lambda_bound}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter(format!("δ must lie in (0,1), got {delta}")));
    }
    let n = y.n_points();
    let trials = params
        .candidate_trials
        .unwrap_or_else(|| default_candidate_trials(k, n, delta))
        .max(1);

    let p = y.latent_dim();
    let per_trial_eps = epsilon / trials as f64;
    let per_trial_delta = delta / trials as f64;
    let mut centers = Vec::new();
    for t in 0..trials {
        let shift: Vec<f64> = if params.zero_shift {
            vec![0.0; p]
        } else {
            let mut gen = rng.child(format!("shift-{t}")).rng();
            (0..p)
                .map(|_| (gen.gen::<f64>() * 2.0 - 1.0) * lambda_bound)
                .collect()
        };
        let root = CubeNode::new(shift, lambda_bound)?;
        let emitted = private_partition(
            y,
            per_trial_eps,
            per_trial_delta,
            &root,
            params,
            &rng.child(format!("partition-{t}")),
        )?;
        ledger.record("private_partition", per_trial_eps, per_trial_delta);
        centers.extend(emitted);
    }
    Ok(CandidateSet {
        centers,
        epsilon_spent: epsilon,
        delta,
    })
}

/// The printed trial-count formula T = 25k·ln(n/δ), exposed for
/// budget-accounting tests.
pub fn default_candidate_trials(k: usize, n: usize, delta: f64) -> usize {
    let ratio = (n.max(1) as f64) / delta;
    ((25.0 * k as f64 * ratio.ln()).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{MaskSemantics, SparseRatings};
    use ndarray::Array2;

    fn tiny_projected() -> ProjectedData {
        let x = SparseRatings::new(
            3,
            2,
            vec![(0, 0, 0.3), (1, 1, 0.7), (2, 0, 0.1)],
            MaskSemantics::ImplicitZeros,
        )
        .unwrap();
        ProjectedData::with_projection(&x, Array2::eye(2)).unwrap()
    }

    #[test]
    fn forced_single_trial_with_zero_shift_equals_one_partition_call() {
        let y = tiny_projected();
        let params = ClusteringParams {
            candidate_trials: Some(1),
            zero_shift: true,
            ..ClusteringParams::default()
        };
        let mut ledger = PrivacyLedger::sequential();
        let rng = RngStream::named(4, "cand");
        let eps = Epsilon::finite(2.0).unwrap();
        let c = candidate_set(&y, 2, eps, 0.2, 1.0, &params, &mut ledger, &rng).unwrap();

        let root = CubeNode::new(vec![0.0, 0.0], 1.0).unwrap();
        let direct = private_partition(
            &y,
            eps,
            0.2,
            &root,
            &params,
            &rng.child("partition-0"),
        )
        .unwrap();
        assert_eq!(c.centers, direct);
    }

    #[test]
    fn output_contains_at_least_the_root_centers() {
        let y = tiny_projected();
        let params = ClusteringParams {
            candidate_trials: Some(5),
            ..ClusteringParams::default()
        };
        let mut ledger = PrivacyLedger::sequential();
        let c = candidate_set(
            &y,
            2,
            Epsilon::finite(0.01).unwrap(),
            0.2,
            1.0,
            &params,
            &mut ledger,
            &RngStream::named(5, "cand"),
        )
        .unwrap();
        assert!(c.centers.len() >= 5);
    }

    #[test]
    fn ledger_shows_t_events_summing_to_epsilon() {
        let y = tiny_projected();
        let t = 7;
        let params = ClusteringParams {
            candidate_trials: Some(t),
            ..ClusteringParams::default()
        };
        let mut ledger = PrivacyLedger::sequential();
        let eps = 1.4;
        candidate_set(
            &y,
            2,
            Epsilon::finite(eps).unwrap(),
            0.2,
            1.0,
            &params,
            &mut ledger,
            &RngStream::named(6, "cand"),
        )
        .unwrap();
        assert_eq!(ledger.events().len(), t);
        for ev in ledger.events() {
            assert!((ev.epsilon.value() - eps / t as f64).abs() < 1e-15);
        }
        assert!((ledger.sequential_total() - eps).abs() < 1e-12);
    }
}
