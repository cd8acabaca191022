//! The full private prototype pipeline.

use ndarray::Array2;

use crate::clustering::{
    candidate_set, jl_project, kmeans_loss, local_swap, sparse_recovery, ClusteringParams,
};
use crate::core::{EntityId, Epsilon, PrivacyLedger, PrototypeSet, RngStream, SparseRatings};
use crate::dp::exp_mechanism_sample;
use crate::error::{Error, Result};

/// Trial count T = 2·ln(1/δ), at least 1.
pub fn default_trials(delta: f64) -> usize {
    ((2.0 * (1.0 / delta).ln()).ceil() as usize).max(1)
}

/// Projection dimension p = 8·ln n, at least 1.
pub fn default_latent_dim(n: usize) -> usize {
    ((8.0 * (n.max(2) as f64).ln()).ceil() as usize).max(1)
}

/// Generate k ε-DP prototype rows for one entity's matrix.
///
/// Runs T independent trials of project → candidate grid (ε/6T) → local swap
/// (ε/6T) → nearest-center partition → per-cluster sparse recovery (ε/3T,
/// split between its selection and noise halves), then picks one trial's
/// recovered centers with an exponential mechanism on the original-space
/// clustering loss (ε/6, printed constant 24Λ² in the exponent). Every stage
/// is itemized on `ledger`; the itemized total 5ε/6 stays within the ε
/// charged to the release, which is what [`PrototypeSet::epsilon_spent`]
/// reports.
#[allow(clippy::too_many_arguments)]
pub fn private_prototypes(
    x: &SparseRatings,
    k: usize,
    epsilon: Epsilon,
    delta: f64,
    entity_id: &EntityId,
    params: &ClusteringParams,
    ledger: &mut PrivacyLedger,
    rng: &RngStream,
) -> Result<PrototypeSet> {
    let n = x.n_rows();
    if k == 0 || k > n {
        return Err(Error::parameter(format!(
            "k = {k} must satisfy 1 ≤ k ≤ n_rows = {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter(format!("δ must lie in (0,1), got {delta}")));
    }
    let lambda = x.lambda_bound();
    if lambda <= 0.0 {
        return Err(Error::parameter(
            "private prototypes need a positive data bound Λ".to_string(),
        ));
    }
    let s = x.sparsity();
    let m = x.n_cols();
    let trials = params.trials.unwrap_or_else(|| default_trials(delta)).max(1);
    let p = params.latent_dim.unwrap_or_else(|| default_latent_dim(n));

    let stage_eps = epsilon / (6.0 * trials as f64);
    let recovery_eps = epsilon / (3.0 * trials as f64);

    let dense_rows: Vec<Vec<f64>> = (0..n).map(|i| x.dense_row(i)).collect::<Result<_>>()?;

    let mut trial_protos: Vec<Array2<f64>> = Vec::with_capacity(trials);
    let mut trial_losses: Vec<f64> = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_rng = rng.child(format!("trial-{t}"));
        let projected = jl_project(x, p, &trial_rng.child("project"))?;
        let cands = candidate_set(
            &projected,
            k,
            stage_eps,
            delta,
            lambda,
            params,
            ledger,
            &trial_rng.child("candidates"),
        )?;
        let clustering = local_swap(
            &projected,
            &cands,
            k,
            stage_eps,
            delta,
            lambda,
            params,
            &trial_rng.child("swap"),
        )?;
        ledger.record("local_swap", stage_eps, delta);

        // partition rows by their assigned center, recover in ℝᵐ
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &c) in clustering.assignment.iter().enumerate() {
            members[c].push(i);
        }
        let mut recovered = Array2::zeros((k, m));
        for (j, idxs) in members.iter().enumerate() {
            if idxs.is_empty() {
                // an empty cluster yields the domain-floor prototype so the
                // server always receives exactly k rows
                continue;
            }
            let rows: Vec<Vec<f64>> = idxs.iter().map(|&i| dense_rows[i].clone()).collect();
            let v = sparse_recovery(
                &rows,
                recovery_eps,
                s,
                lambda,
                params,
                &trial_rng.child(format!("recover-{j}")),
            )?;
            for (c, val) in v.into_iter().enumerate() {
                recovered[[j, c]] = val;
            }
        }
        ledger.record("sparse_recovery/top_s", recovery_eps / 2.0, 0.0);
        ledger.record("sparse_recovery/laplace", recovery_eps / 2.0, 0.0);

        let centers: Vec<Vec<f64>> = (0..k).map(|j| recovered.row(j).to_vec()).collect();
        trial_losses.push(kmeans_loss(&centers, &dense_rows)?);
        trial_protos.push(recovered);
    }

    // Final trajectory selection: with utility −L, sensitivity 2Λ² and budget
    // ε/6 the selection probability is exp(−(ε/6)·L/(4Λ²)) = exp(−εL/(24Λ²)),
    // the printed constant.
    let selection_eps = epsilon / 6.0;
    let utilities: Vec<f64> = trial_losses.iter().map(|l| -l).collect();
    let choice = exp_mechanism_sample(
        &utilities,
        2.0 * lambda * lambda,
        selection_eps,
        &rng.child("choose"),
    )?;
    ledger.record("trajectory_selection", selection_eps, 0.0);

    PrototypeSet::new(
        trial_protos.swap_remove(choice.value),
        epsilon,
        delta,
        entity_id.clone(),
        lambda,
    )
}
