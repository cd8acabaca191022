//! Private recursive space partition.
//!
//! Starting from one root cube, each level splits every active cube evenly in
//! all dimensions and keeps a child alive with probability f(count) that
//! rises steeply once the child holds more than γ = (20/ε′)·ln(n/δ) points,
//! with ε′ = ε/(2·ln n). Centers of every cube that was ever active are
//! emitted. Only occupied child cells are materialized: with p ≈ 8·ln n
//! dimensions the 2ᵖ full grid is unrepresentable, and an empty cube's
//! survival probability ½·e^(−ε′γ) = ½(δ/n)²⁰ is negligible.

use std::collections::BTreeMap;

use rand::distributions::Open01;
use rand::Rng;

use crate::clustering::{ClusteringParams, CubeNode, ProjectedData};
use crate::core::{Epsilon, RngStream};
use crate::error::{Error, Result};

fn survival_probability(count: f64, gamma: f64, eps_prime: f64) -> f64 {
    if count <= gamma {
        0.5 * (-eps_prime * (gamma - count)).exp()
    } else {
        1.0 - 0.5 * (eps_prime * (gamma - count)).exp()
    }
}

/// Emit the private grid of cube centers for `y` inside the root cube `q0`.
///
/// Points outside the root are never counted (the candidate stage calls this
/// with randomly shifted roots that need not cover the data). In infinite-ε
/// mode survival is deterministic: occupied cubes always survive, empty ones
/// never do. Recursion stops once a cube's half-width falls below `r_min`.
pub fn private_partition(
    y: &ProjectedData,
    epsilon: Epsilon,
    delta: f64,
    q0: &CubeNode,
    params: &ClusteringParams,
    rng: &RngStream,
) -> Result<Vec<Vec<f64>>> {
    if q0.dim() != y.latent_dim() {
        return Err(Error::parameter(format!(
            "root cube dimension {} does not match projected dimension {}",
            q0.dim(),
            y.latent_dim()
        )));
    }
    if !(0.0..1.0).contains(&delta) || delta <= 0.0 {
        return Err(Error::parameter(format!("δ must lie in (0,1), got {delta}")));
    }
    if y.points().iter().any(|v| !v.is_finite()) {
        return Err(Error::parameter("projected data must be finite".to_string()));
    }

    let n = y.n_points();
    let p = y.latent_dim();
    let eps_prime = if epsilon.is_infinite() {
        f64::INFINITY
    } else {
        epsilon.value() / (2.0 * (n as f64).ln().max(1.0))
    };
    let gamma = if epsilon.is_infinite() {
        0.0
    } else {
        (20.0 / eps_prime) * ((n.max(1) as f64) / delta).ln()
    };

    // Depth cap: a cube of half-width below r_min spans less than the
    // resolution anyone downstream can use.
    let diag = 2.0 * q0.half_width * (p as f64).sqrt();
    let depth_cap = ((diag / params.r_min).log2().ceil() as i64).max(1) as u32;

    let members: Vec<usize> = (0..n)
        .filter(|&i| {
            let row = y.points().row(i);
            q0.contains(row.as_slice().expect("row is contiguous"))
        })
        .collect();
    let mut root = q0.clone();
    root.member_count = members.len();
    root.depth = 0;

    let mut active: Vec<(CubeNode, Vec<usize>)> = vec![(root, members)];
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut gen = rng.rng();

    for _level in 0..depth_cap {
        if active.is_empty() {
            break;
        }
        for (cube, _) in &active {
            centers.push(cube.center.clone());
        }
        let mut next: Vec<(CubeNode, Vec<usize>)> = Vec::new();
        for (cube, members) in active.drain(..) {
            // Group members by occupied child cell; keys sorted for a
            // deterministic survival-draw order.
            let mut cells: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
            for idx in members {
                let row = y.points().row(idx);
                let key: Vec<bool> = row
                    .iter()
                    .zip(cube.center.iter())
                    .map(|(x, c)| x >= c)
                    .collect();
                cells.entry(key).or_default().push(idx);
            }
            for (key, idxs) in cells {
                let count = idxs.len();
                let survives = if epsilon.is_infinite() {
                    count > 0
                } else {
                    let f = survival_probability(count as f64, gamma, eps_prime);
                    let u: f64 = gen.sample(Open01);
                    u < f
                };
                if survives {
                    next.push((cube.child(&key, count), idxs));
                }
            }
        }
        active = next;
    }

    Ok(centers)
}
