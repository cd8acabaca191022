//! Non-private clustering baselines: Lloyd k-means with k-means++ seeding,
//! and uniform row exemplars.

use ndarray::Array2;
use rand::Rng;

use crate::clustering::{squared_distance, Clustering};
use crate::core::{EntityId, Epsilon, PrototypeSet, RngStream, SparseRatings};
use crate::error::{Error, Result};

const LLOYD_ITERATION_CAP: usize = 300;

/// Σ over rows of the squared distance to the nearest center.
pub fn kmeans_loss(centers: &[Vec<f64>], rows: &[Vec<f64>]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::parameter("centers must be nonempty".to_string()));
    }
    Ok(rows
        .iter()
        .map(|r| {
            centers
                .iter()
                .map(|c| squared_distance(r, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// k-means++ seeding: first center uniform, then D²-weighted without
/// replacement. When every remaining row has zero distance (duplicates of
/// chosen centers) the next index is drawn uniformly from the unchosen rows.
fn kmeans_pp(rows: &[Vec<f64>], k: usize, rng: &RngStream) -> Vec<usize> {
    let n = rows.len();
    let mut gen = rng.rng();
    let mut chosen: Vec<usize> = vec![gen.gen_range(0..n)];
    let mut d2: Vec<f64> = rows
        .iter()
        .map(|r| squared_distance(r, &rows[chosen[0]]))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = gen.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                target -= w;
                if target <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // all remaining distances are zero: pick uniformly among unchosen
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[gen.gen_range(0..unchosen.len())]
        };
        chosen.push(next);
        for (i, r) in rows.iter().enumerate() {
            d2[i] = d2[i].min(squared_distance(r, &rows[next]));
        }
    }
    chosen
}

/// Standard Lloyd iterations with k-means++ seeding, run until the
/// assignment reaches a fixpoint or the iteration cap.
pub fn kmeans_baseline(x: &SparseRatings, k: usize, rng: &RngStream) -> Result<Clustering> {
    let n = x.n_rows();
    if k == 0 || k > n {
        return Err(Error::parameter(format!(
            "k = {k} must satisfy 1 ≤ k ≤ n_rows = {n}"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..n).map(|i| x.dense_row(i)).collect::<Result<_>>()?;
    let seeds = kmeans_pp(&rows, k, &rng.child("seed"));
    let mut centers: Vec<Vec<f64>> = seeds.iter().map(|&i| rows[i].clone()).collect();
    let mut assignment = vec![0usize; n];

    for _ in 0..LLOYD_ITERATION_CAP {
        let mut changed = false;
        for (i, r) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.iter().enumerate() {
                let d = squared_distance(r, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let m = x.n_cols();
        let mut sums = vec![vec![0.0f64; m]; k];
        let mut counts = vec![0usize; k];
        for (i, r) in rows.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (acc, v) in sums[assignment[i]].iter_mut().zip(r.iter()) {
                *acc += v;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for v in sums[j].iter_mut() {
                    *v /= counts[j] as f64;
                }
                centers[j] = sums[j].clone();
            }
            // an empty cluster keeps its previous center
        }
    }
    let loss = kmeans_loss(&centers, &rows)?;
    Ok(Clustering {
        centers,
        assignment,
        loss,
    })
}

/// k distinct rows sampled uniformly without replacement, packaged as a
/// (non-private) prototype set: the release discloses raw rows, so the budget
/// is recorded as infinite.
pub fn krandom_baseline(
    x: &SparseRatings,
    k: usize,
    entity_id: &EntityId,
    rng: &RngStream,
) -> Result<PrototypeSet> {
    let n = x.n_rows();
    if k == 0 || k > n {
        return Err(Error::parameter(format!(
            "k = {k} must satisfy 1 ≤ k ≤ n_rows = {n}"
        )));
    }
    let mut pool: Vec<usize> = (0..n).collect();
    let mut gen = rng.rng();
    for i in 0..k {
        let j = gen.gen_range(i..n);
        pool.swap(i, j);
    }
    let m = x.n_cols();
    let mut proto = Array2::zeros((k, m));
    for (out_row, &i) in pool[..k].iter().enumerate() {
        for (c, v) in x.dense_row(i)?.into_iter().enumerate() {
            proto[[out_row, c]] = v;
        }
    }
    PrototypeSet::new(proto, Epsilon::infinite(), 0.0, entity_id.clone(), x.lambda_bound())
}
