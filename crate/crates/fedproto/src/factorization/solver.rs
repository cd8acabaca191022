//! Projected coordinate descent on per-row non-negative least-squares
//! sub-problems.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::core::SparseRatings;

/// Observed cells of a matrix in both row-major and column-major form. The
/// column-major view drives the V half-step, which is the same row solver run
/// against the transpose.
pub(crate) struct Observations {
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    n_observed: usize,
}

impl Observations {
    pub(crate) fn from_ratings(x: &SparseRatings) -> Self {
        let mut rows = Vec::with_capacity(x.n_rows());
        let mut cols = vec![Vec::new(); x.n_cols()];
        for r in 0..x.n_rows() {
            let row = x.observed_row(r);
            for &(c, v) in &row {
                cols[c].push((r, v));
            }
            rows.push(row);
        }
        let n_observed = rows.iter().map(Vec::len).sum();
        Observations {
            rows,
            cols,
            n_observed,
        }
    }

    pub(crate) fn n_observed(&self) -> usize {
        self.n_observed
    }

    pub(crate) fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub(crate) fn by_rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub(crate) fn by_cols(&self) -> &[Vec<(usize, f64)>] {
        &self.cols
    }

    /// (1/N) Σ residual² + λ(‖U‖² + ‖V‖²).
    pub(crate) fn objective(&self, u: &Array2<f64>, v: &Array2<f64>, lambda: f64) -> f64 {
        let rank = u.ncols();
        let sse: f64 = self
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                let ui = u.row(i);
                row.iter()
                    .map(|&(j, x)| {
                        let vj = v.row(j);
                        let mut pred = 0.0;
                        for f in 0..rank {
                            pred += ui[f] * vj[f];
                        }
                        let r = x - pred;
                        r * r
                    })
                    .sum::<f64>()
            })
            .sum();
        let reg: f64 = u.iter().map(|a| a * a).sum::<f64>() + v.iter().map(|a| a * a).sum::<f64>();
        sse / self.n_observed.max(1) as f64 + lambda * reg
    }
}

/// One pass of `inner_iters` coordinate-descent sweeps over every row of
/// `coeffs`, holding `fixed` constant. Each coordinate update is the exact
/// minimizer of the one-dimensional quadratic projected onto [0, ∞), so the
/// objective cannot increase.
pub(crate) fn solve_rows(
    observed: &[Vec<(usize, f64)>],
    fixed: &Array2<f64>,
    coeffs: &mut Array2<f64>,
    lambda: f64,
    inv_n: f64,
    inner_iters: usize,
) {
    coeffs
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(observed.par_iter())
        .for_each(|(mut u, row)| {
            solve_one_row(row, fixed, u.as_slice_mut().expect("row is contiguous"), lambda, inv_n, inner_iters, None);
        });
}

/// Like [`solve_rows`] but sweeps each row until the largest coordinate move
/// falls below a stationarity threshold. Used for the convex fixed-V fit.
pub(crate) fn solve_rows_to_convergence(
    observed: &[Vec<(usize, f64)>],
    fixed: &Array2<f64>,
    coeffs: &mut Array2<f64>,
    lambda: f64,
    inv_n: f64,
) {
    coeffs
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(observed.par_iter())
        .for_each(|(mut u, row)| {
            solve_one_row(
                row,
                fixed,
                u.as_slice_mut().expect("row is contiguous"),
                lambda,
                inv_n,
                500,
                Some(1e-12),
            );
        });
}

fn solve_one_row(
    observed: &[(usize, f64)],
    fixed: &Array2<f64>,
    u: &mut [f64],
    lambda: f64,
    inv_n: f64,
    max_sweeps: usize,
    stop_delta: Option<f64>,
) {
    let rank = fixed.ncols();
    if observed.is_empty() {
        // No data term: the regularizer pins the row at zero (λ > 0) or any
        // stationary point (λ = 0); zero is the canonical choice.
        if lambda > 0.0 {
            u.fill(0.0);
        }
        return;
    }

    // residual r_j = x_j − u·v_j, maintained through coordinate updates
    let mut resid: Vec<f64> = observed
        .iter()
        .map(|&(j, x)| {
            let vj = fixed.row(j);
            let mut pred = 0.0;
            for f in 0..rank {
                pred += u[f] * vj[f];
            }
            x - pred
        })
        .collect();

    // curvature h_f = (2/N)Σ_j v_jf² + 2λ is constant within the solve
    let mut curvature = vec![2.0 * lambda; rank];
    for &(j, _) in observed {
        let vj = fixed.row(j);
        for f in 0..rank {
            curvature[f] += 2.0 * inv_n * vj[f] * vj[f];
        }
    }

    for _ in 0..max_sweeps {
        let mut max_move = 0.0f64;
        for f in 0..rank {
            if curvature[f] <= 0.0 {
                continue;
            }
            let mut grad = 2.0 * lambda * u[f];
            for (idx, &(j, _)) in observed.iter().enumerate() {
                grad -= 2.0 * inv_n * resid[idx] * fixed[[j, f]];
            }
            let proposed = (u[f] - grad / curvature[f]).max(0.0);
            let delta = proposed - u[f];
            if delta != 0.0 {
                for (idx, &(j, _)) in observed.iter().enumerate() {
                    resid[idx] -= delta * fixed[[j, f]];
                }
                u[f] = proposed;
                max_move = max_move.max(delta.abs());
            }
        }
        if let Some(threshold) = stop_delta {
            if max_move <= threshold {
                break;
            }
        }
    }
}
