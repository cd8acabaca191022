//! Regularized non-negative matrix factorization.
//!
//! The objective over the observed cells T is
//!
//! ```text
//! (1/N) Σ_{(i,j)∈T} (x_ij − u_i·v_j)²  +  λ(‖U‖² + ‖V‖²),   U, V ≥ 0
//! ```
//!
//! solved by block-coordinate alternating non-negative least squares: each
//! half-step fixes one factor and solves every row of the other by projected
//! coordinate descent. Every coordinate update exactly minimizes a convex
//! one-dimensional quadratic over the half-line, so the objective is
//! non-increasing through every half-step.

mod io;
mod solver;

pub use io::{load_model, save_model};

use ndarray::Array2;
use rand::Rng;

use crate::core::{FactorModel, MaskSemantics, RngStream, SparseRatings};
use crate::error::{Error, Result};
use solver::{solve_rows, Observations};

/// Hyper-parameters for a factorization run.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    /// Latent rank ℓ.
    pub rank: usize,
    /// Regularization weight λ.
    pub lambda: f64,
    /// Cap on alternation rounds.
    pub max_outer_iters: usize,
    /// Stop when the relative objective change falls below this.
    pub tolerance: f64,
    /// Coordinate-descent sweeps per row sub-problem.
    pub inner_iters: usize,
    /// Label mixed into the initialization stream.
    pub init_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            rank: 10,
            lambda: 0.1,
            max_outer_iters: 200,
            tolerance: 1e-6,
            inner_iters: 3,
            init_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::parameter("rank must be ≥ 1".to_string()));
        }
        if self.lambda < 0.0 || !self.lambda.is_finite() {
            return Err(Error::parameter(format!("λ must be finite and ≥ 0, got {}", self.lambda)));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::parameter("tolerance must be positive".to_string()));
        }
        Ok(())
    }
}

/// A fitted model together with its optimization trace.
#[derive(Debug, Clone)]
pub struct Fit {
    pub model: FactorModel,
    /// Objective value at initialization and after each outer iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

impl Fit {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace is never empty")
    }
}

/// The Eq.-2 style objective for explicit factor matrices.
pub fn objective(u: &Array2<f64>, v: &Array2<f64>, x: &SparseRatings, lambda: f64) -> f64 {
    let obs = Observations::from_ratings(x);
    obs.objective(u, v, lambda)
}

/// Analytic gradient of the objective with respect to U.
pub fn objective_grad_u(
    u: &Array2<f64>,
    v: &Array2<f64>,
    x: &SparseRatings,
    lambda: f64,
) -> Array2<f64> {
    let obs = Observations::from_ratings(x);
    let inv_n = 1.0 / obs.n_observed() as f64;
    let rank = u.ncols();
    let mut grad = Array2::zeros(u.raw_dim());
    for i in 0..u.nrows() {
        let ui = u.row(i);
        for &(j, xij) in obs.row(i) {
            let vj = v.row(j);
            let r = xij - ui.dot(&vj);
            for f in 0..rank {
                grad[[i, f]] -= 2.0 * inv_n * r * vj[f];
            }
        }
        for f in 0..rank {
            grad[[i, f]] += 2.0 * lambda * u[[i, f]];
        }
    }
    grad
}

fn init_factor(rows: usize, rank: usize, scale: f64, rng: &RngStream) -> Array2<f64> {
    let mut gen = rng.rng();
    Array2::from_shape_fn((rows, rank), |_| gen.gen::<f64>() * scale)
}

fn mean_observed(x: &SparseRatings) -> f64 {
    let n = x.observed_count();
    if n == 0 {
        return 0.0;
    }
    x.entries().iter().map(|&(_, _, v)| v).sum::<f64>() / n as f64
}

/// Approximate local minimizer of the objective, alternating U and V
/// half-steps until the relative objective change drops below tolerance or
/// the iteration cap is hit.
pub fn joint_factorize(x: &SparseRatings, cfg: &TrainConfig, rng: &RngStream) -> Result<Fit> {
    cfg.validate()?;
    if x.observed_count() == 0 {
        return Err(Error::parameter("cannot factorize an empty matrix".to_string()));
    }
    if cfg.rank > x.n_rows().min(x.n_cols()) {
        return Err(Error::parameter(format!(
            "rank {} exceeds min(n, m) = {}",
            cfg.rank,
            x.n_rows().min(x.n_cols())
        )));
    }

    let obs = Observations::from_ratings(x);
    let inv_n = 1.0 / obs.n_observed() as f64;
    // Scale the initial entries so that u_i·v_j starts near the data mean.
    let scale = (mean_observed(x) / cfg.rank as f64).max(0.0).sqrt();
    let init = rng.child(format!("init{}", cfg.init_seed));
    let mut u = init_factor(x.n_rows(), cfg.rank, scale, &init.child("u"));
    let mut v = init_factor(x.n_cols(), cfg.rank, scale, &init.child("v"));

    let mut trace = vec![obs.objective(&u, &v, cfg.lambda)];
    let mut iterations = 0;
    for _ in 0..cfg.max_outer_iters {
        solve_rows(obs.by_rows(), &v, &mut u, cfg.lambda, inv_n, cfg.inner_iters);
        solve_rows(obs.by_cols(), &u, &mut v, cfg.lambda, inv_n, cfg.inner_iters);
        iterations += 1;
        let prev = *trace.last().unwrap();
        let cur = obs.objective(&u, &v, cfg.lambda);
        debug_assert!(cur <= prev + 1e-12 * prev.abs().max(1.0));
        trace.push(cur);
        if (prev - cur).abs() <= cfg.tolerance * prev.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }

    let model = FactorModel::new(u, v, cfg.lambda)?;
    Ok(Fit {
        model,
        objective_trace: trace,
        iterations,
    })
}

/// Learn the shared item matrix from a pooled prototype matrix: the V block
/// of a joint factorization of the fully observed prototypes.
pub fn fit_item_factors(pooled: &Array2<f64>, cfg: &TrainConfig, rng: &RngStream) -> Result<Fit> {
    if pooled.nrows() < cfg.rank {
        return Err(Error::parameter(format!(
            "insufficient prototypes for rank: {} rows < rank {}",
            pooled.nrows(),
            cfg.rank
        )));
    }
    let entries: Vec<(usize, usize, f64)> = pooled
        .indexed_iter()
        .filter(|&(_, &v)| v != 0.0)
        .map(|((r, c), &v)| (r, c, v))
        .collect();
    let ratings = SparseRatings::new(
        pooled.nrows(),
        pooled.ncols(),
        entries,
        MaskSemantics::ImplicitZeros,
    )?;
    joint_factorize(&ratings, cfg, rng)
}

/// Fit user factors against a fixed item matrix: each row is an independent
/// non-negative regularized least-squares problem over the row's observed
/// cells, solved by projected coordinate descent from a zero start (the
/// sub-problem is convex, so no random initialization is needed).
pub fn fit_user_factors(
    x: &SparseRatings,
    item_factors: &Array2<f64>,
    cfg: &TrainConfig,
) -> Result<Array2<f64>> {
    cfg.validate()?;
    if item_factors.nrows() != x.n_cols() {
        return Err(Error::parameter(format!(
            "item matrix has {} rows but data has {} columns",
            item_factors.nrows(),
            x.n_cols()
        )));
    }
    if item_factors.ncols() != cfg.rank {
        return Err(Error::parameter(format!(
            "item matrix rank {} does not match config rank {}",
            item_factors.ncols(),
            cfg.rank
        )));
    }
    let obs = Observations::from_ratings(x);
    let inv_n = 1.0 / obs.n_observed().max(1) as f64;
    let mut u = Array2::zeros((x.n_rows(), cfg.rank));
    // The per-row problem is convex: sweep until stationary.
    solver::solve_rows_to_convergence(obs.by_rows(), item_factors, &mut u, cfg.lambda, inv_n);
    Ok(u)
}
