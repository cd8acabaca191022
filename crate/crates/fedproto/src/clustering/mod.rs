//! Differentially private prototype generation and non-private clustering
//! baselines.
//!
//! The private pipeline runs T independent trials of
//! project → candidate grid → local swap → nearest-center partition →
//! per-cluster sparse recovery, then picks one trial's recovered centers by
//! an exponential mechanism on the clustering loss. Every stage's budget is
//! itemized on a [`PrivacyLedger`]; the itemized spend always stays within
//! the ε charged for the release.

mod baselines;
mod candidate;
mod partition;
mod projection;
mod prototypes;
mod recovery;
mod swap;

pub use baselines::{kmeans_baseline, kmeans_loss, krandom_baseline};
pub use candidate::candidate_set;
pub use partition::private_partition;
pub use projection::jl_project;
pub use prototypes::private_prototypes;
pub use recovery::sparse_recovery;
pub use swap::local_swap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::core::{Epsilon, SparseRatings};
use crate::error::{Error, Result};

/// Which Gumbel calibration the sparse-recovery top-s selection uses.
///
/// `Calibrated` is the scale that makes one-shot top-k equal k sequential
/// exponential mechanisms (2kΔq/ε). `PrintedUtilityProportional` reproduces
/// the utility-scaled form printed in the source algorithm, kept only for
/// comparison; neither is treated as ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GumbelScale {
    Calibrated,
    PrintedUtilityProportional,
}

/// Tunables for the private clustering pipeline. `None` selects the printed
/// defaults; overrides exist as test hooks and for runtime budgeting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringParams {
    /// Cube half-widths below this carry no information; caps recursion depth.
    pub r_min: f64,
    /// Swap iterations; default ceil(k·ln(n/δ)).
    pub swap_iters: Option<usize>,
    /// Shifted-grid trials in the candidate stage; default ceil(25k·ln(n/δ)).
    pub candidate_trials: Option<usize>,
    /// Projection dimension; default ceil(8·ln n).
    pub latent_dim: Option<usize>,
    /// Independent pipeline trials; default ceil(2·ln(1/δ)).
    pub trials: Option<usize>,
    pub gumbel_scale: GumbelScale,
    /// Test hook: use a zero shift vector in the candidate stage.
    pub zero_shift: bool,
}

impl Default for ClusteringParams {
    fn default() -> Self {
        ClusteringParams {
            r_min: 1e-3,
            swap_iters: None,
            candidate_trials: None,
            latent_dim: None,
            trials: None,
            gumbel_scale: GumbelScale::Calibrated,
            zero_shift: false,
        }
    }
}

/// Data after Johnson-Lindenstrauss projection: Y = (1/√p)·X·Gᵀ.
#[derive(Debug, Clone)]
pub struct ProjectedData {
    y: Array2<f64>,
    projection: Array2<f64>,
    p: usize,
}

impl ProjectedData {
    /// Project with an explicitly supplied matrix (test hook; `jl_project`
    /// draws G from the stream).
    pub fn with_projection(x: &SparseRatings, projection: Array2<f64>) -> Result<Self> {
        if projection.ncols() != x.n_cols() {
            return Err(Error::parameter(format!(
                "projection has {} columns but data has {}",
                projection.ncols(),
                x.n_cols()
            )));
        }
        if projection.nrows() == 0 {
            return Err(Error::parameter("projection dimension p must be ≥ 1".to_string()));
        }
        if projection.iter().any(|v| !v.is_finite()) {
            return Err(Error::parameter("projection must be finite".to_string()));
        }
        let p = projection.nrows();
        let scale = 1.0 / (p as f64).sqrt();
        let mut y = Array2::zeros((x.n_rows(), p));
        for &(r, c, v) in x.entries() {
            for d in 0..p {
                y[[r, d]] += scale * v * projection[[d, c]];
            }
        }
        Ok(ProjectedData { y, projection, p })
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn projection(&self) -> &Array2<f64> {
        &self.projection
    }

    pub fn latent_dim(&self) -> usize {
        self.p
    }

    pub fn n_points(&self) -> usize {
        self.y.nrows()
    }
}

/// An axis-aligned cube in the projected space.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeNode {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub depth: u32,
    pub member_count: usize,
}

impl CubeNode {
    pub fn new(center: Vec<f64>, half_width: f64) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::parameter(format!(
                "cube half-width must be positive, got {half_width}"
            )));
        }
        Ok(CubeNode {
            center,
            half_width,
            depth: 0,
            member_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point
            .iter()
            .zip(self.center.iter())
            .all(|(x, c)| (x - c).abs() <= self.half_width)
    }

    /// Child cube identified by per-dimension upper/lower bits. Children
    /// partition the parent evenly: half-width halves each level.
    pub(crate) fn child(&self, upper_bits: &[bool], members: usize) -> CubeNode {
        let hw = self.half_width / 2.0;
        let center = self
            .center
            .iter()
            .zip(upper_bits.iter())
            .map(|(c, &up)| if up { c + hw } else { c - hw })
            .collect();
        CubeNode {
            center,
            half_width: hw,
            depth: self.depth + 1,
            member_count: members,
        }
    }
}

/// Candidate centers emitted by the shifted-grid stage.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub centers: Vec<Vec<f64>>,
    pub epsilon_spent: Epsilon,
    pub delta: f64,
}

/// A k-clustering: centers, per-row assignment to the nearest center, and
/// the summed squared distance loss.
#[derive(Debug, Clone)]
pub struct Clustering {
    pub centers: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub loss: f64,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}
