//! Sparse recovery of a cluster centroid in the original space.
//!
//! Computes the cluster mean, privately selects its top-s coordinates with
//! Gumbel noise (half the budget), adds Laplace(2Λs/(ε·n)) to the selected
//! coordinates (the other half), zeroes the rest, and clamps to [0, Λ].
//! Clamping is post-processing and costs no budget.

use crate::clustering::{ClusteringParams, GumbelScale};
use crate::core::{Epsilon, RngStream};
use crate::dp::{exp_mechanism_top_k, gumbel, laplace_many};
use crate::error::{Error, Result};

/// Recover one cluster's centroid from its member rows.
pub fn sparse_recovery(
    rows: &[Vec<f64>],
    epsilon: Epsilon,
    s: usize,
    lambda_bound: f64,
    params: &ClusteringParams,
    rng: &RngStream,
) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Err(Error::parameter("empty cluster".to_string()));
    }
    if lambda_bound <= 0.0 || !lambda_bound.is_finite() {
        return Err(Error::parameter(format!(
            "Λ must be finite and positive, got {lambda_bound}"
        )));
    }
    let dim = rows[0].len();
    for row in rows {
        if row.len() != dim {
            return Err(Error::parameter("cluster rows have mixed dimensions".to_string()));
        }
        if row.iter().any(|v| !v.is_finite() || v.abs() > lambda_bound + 1e-12) {
            return Err(Error::parameter(format!(
                "cluster entries must satisfy |x| ≤ Λ = {lambda_bound}"
            )));
        }
    }
    let s = s.min(dim).max(1);
    let n_cluster = rows.len() as f64;
    let mut mean = vec![0.0f64; dim];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n_cluster;
    }

    // top-s coordinate selection on half the budget
    let selected: Vec<usize> = if epsilon.is_infinite() {
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| mean[b].partial_cmp(&mean[a]).unwrap().then(a.cmp(&b)));
        order.truncate(s);
        order
    } else {
        match params.gumbel_scale {
            GumbelScale::Calibrated => {
                // one record moves a coordinate mean by at most 2Λ/n
                let sensitivity = 2.0 * lambda_bound / n_cluster;
                exp_mechanism_top_k(&mean, sensitivity, epsilon / 2.0, s, &rng.child("select"))?
                    .value
            }
            GumbelScale::PrintedUtilityProportional => {
                // the printed form scales each coordinate's noise by |μ_i|
                let coeff = epsilon.value() / (2.0 * s as f64 * lambda_bound);
                let sel_rng = rng.child("select");
                let mut noisy = Vec::with_capacity(dim);
                for (i, &mu) in mean.iter().enumerate() {
                    let b = coeff * mu.abs();
                    let noise = if b > 0.0 {
                        gumbel(b, &sel_rng.child(i.to_string()))?
                    } else {
                        0.0
                    };
                    noisy.push(mu + noise);
                }
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| noisy[b].partial_cmp(&noisy[a]).unwrap().then(a.cmp(&b)));
                order.truncate(s);
                order
            }
        }
    };

    // Laplace perturbation of the selected coordinates on the other half
    let mut out = vec![0.0f64; dim];
    if epsilon.is_infinite() {
        for &i in &selected {
            out[i] = mean[i].clamp(0.0, lambda_bound);
        }
    } else {
        let scale = 2.0 * lambda_bound * s as f64 / (epsilon.value() * n_cluster);
        let noise = laplace_many(scale, selected.len(), &rng.child("noise"))?;
        for (&i, &z) in selected.iter().zip(noise.iter()) {
            out[i] = (mean[i] + z).clamp(0.0, lambda_bound);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ClusteringParams {
        ClusteringParams::default()
    }

    #[test]
    fn empty_cluster_is_an_error() {
        match sparse_recovery(&[], Epsilon::infinite(), 2, 1.0, &params(), &RngStream::new(0)) {
            Err(Error::Parameter(msg)) => assert!(msg.contains("empty cluster")),
            other => panic!("expected empty-cluster error, got {other:?}"),
        }
    }

    #[test]
    fn noiseless_limit_is_top_s_restricted_mean() {
        let rows = vec![
            vec![1.0, 3.0, 0.5, 2.0, 0.0],
            vec![3.0, 1.0, 0.5, 4.0, 0.0],
        ];
        let out = sparse_recovery(&rows, Epsilon::infinite(), 2, 5.0, &params(), &RngStream::new(1))
            .unwrap();
        // mean = (2, 2, 0.5, 3, 0); top-2 = coords 3 and 0 (tie 0<1 keeps 0)
        assert_eq!(out, vec![2.0, 0.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn identical_rows_with_exactly_s_nonzeros_are_reproduced() {
        let row = vec![0.0, 2.5, 0.0, 1.5, 4.0];
        let rows = vec![row.clone(); 7];
        let out = sparse_recovery(&rows, Epsilon::infinite(), 3, 5.0, &params(), &RngStream::new(2))
            .unwrap();
        assert_eq!(out, row);
    }

    #[test]
    fn output_sparsity_and_domain_hold_under_noise() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| (0..12).map(|j| ((i * j) % 5) as f64).collect())
            .collect();
        let out = sparse_recovery(
            &rows,
            Epsilon::finite(0.5).unwrap(),
            4,
            4.0,
            &params(),
            &RngStream::named(5, "rec"),
        )
        .unwrap();
        assert!(out.iter().filter(|&&v| v != 0.0).count() <= 4);
        assert!(out.iter().all(|&v| (0.0..=4.0).contains(&v)));
    }

    #[test]
    fn monte_carlo_mean_matches_restricted_mean_within_bands() {
        // 1000 rows, s = 5, ε = 1: averaged over 200 seeds the output should
        // sit within Laplace-scale confidence bands of the exact top-s mean.
        let dim = 10;
        let n = 1000;
        let lambda = 3.0;
        let mut gen = RngStream::named(77, "rows").rng();
        let base = [2.5, 2.0, 1.5, 1.2, 1.0, 0.2, 0.1, 0.05, 0.0, 0.0];
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                base.iter()
                    .map(|&b| {
                        let jitter: f64 = rand::Rng::gen::<f64>(&mut gen) * 0.2 - 0.1;
                        (b + jitter).clamp(0.0, lambda)
                    })
                    .collect()
            })
            .collect();
        let mut mean = vec![0.0; dim];
        for row in &rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n as f64;
            }
        }
        let s = 5;
        let eps = 1.0;
        let seeds = 200;
        let root = RngStream::named(78, "mc");
        let mut avg = vec![0.0; dim];
        for t in 0..seeds {
            let out = sparse_recovery(
                &rows,
                Epsilon::finite(eps).unwrap(),
                s,
                lambda,
                &params(),
                &root.child(t.to_string()),
            )
            .unwrap();
            for (a, v) in avg.iter_mut().zip(out) {
                *a += v / seeds as f64;
            }
        }
        // Laplace scale b = 2Λs/(εn); se of the 200-seed average ≈ b√2/√200,
        // allow 5 standard errors plus selection slack on the margin coords.
        let b = 2.0 * lambda * s as f64 / (eps * n as f64);
        let band = 5.0 * b * (2.0f64).sqrt() / (seeds as f64).sqrt() + 0.05;
        for i in 0..5 {
            assert!(
                (avg[i] - mean[i]).abs() <= band,
                "coord {i}: avg {} vs mean {} (band {band})",
                avg[i],
                mean[i]
            );
        }
        for i in 8..dim {
            assert!(avg[i] <= 0.1, "tail coord {i} should stay near zero, got {}", avg[i]);
        }
    }
}
