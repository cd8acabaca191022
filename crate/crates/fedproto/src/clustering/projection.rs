//! Johnson-Lindenstrauss random projection ℝᵐ → ℝᵖ.

use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};

use crate::clustering::ProjectedData;
use crate::core::{RngStream, SparseRatings};
use crate::error::{Error, Result};

/// Project the rows of `x` to `p` dimensions with a standard-normal matrix:
/// Y = (1/√p)·X·Gᵀ, G ~ N(0,1)^{p×m}.
pub fn jl_project(x: &SparseRatings, p: usize, rng: &RngStream) -> Result<ProjectedData> {
    if p == 0 {
        return Err(Error::parameter("projection dimension p must be ≥ 1".to_string()));
    }
    let mut gen = rng.rng();
    let g = Array2::from_shape_fn((p, x.n_cols()), |_| StandardNormal.sample(&mut gen));
    ProjectedData::with_projection(x, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::squared_distance;
    use crate::core::MaskSemantics;
    use rand::Rng;

    #[test]
    fn zero_rows_project_to_zero() {
        let x = SparseRatings::new(3, 5, vec![], MaskSemantics::ImplicitZeros).unwrap();
        let y = jl_project(&x, 4, &RngStream::new(1)).unwrap();
        assert!(y.points().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_projection_scales_by_sqrt_m() {
        let x = SparseRatings::new(
            2,
            3,
            vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)],
            MaskSemantics::ImplicitZeros,
        )
        .unwrap();
        let y = ProjectedData::with_projection(&x, Array2::eye(3)).unwrap();
        let scale = 1.0 / 3.0f64.sqrt();
        assert!((y.points()[[0, 0]] - scale).abs() < 1e-15);
        assert!((y.points()[[0, 2]] - 2.0 * scale).abs() < 1e-15);
        assert!((y.points()[[1, 1]] - 3.0 * scale).abs() < 1e-15);
        assert_eq!(y.points()[[1, 0]], 0.0);
    }

    #[test]
    fn pairwise_distances_preserved_within_factor() {
        // 50 random rows, p = ceil(8 ln n): every pairwise distance within
        // a factor 1 ± 0.5 of the original.
        let n = 50;
        let m = 40;
        let mut gen = RngStream::named(3, "jl-rows").rng();
        let mut entries = Vec::new();
        for r in 0..n {
            for c in 0..m {
                entries.push((r, c, gen.gen::<f64>()));
            }
        }
        let x = SparseRatings::new(n, m, entries, MaskSemantics::ImplicitZeros).unwrap();
        let p = (8.0 * (n as f64).ln()).ceil() as usize;
        let y = jl_project(&x, p, &RngStream::named(3, "jl-proj")).unwrap();
        let rows: Vec<Vec<f64>> = (0..n).map(|r| x.dense_row(r).unwrap()).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let orig = squared_distance(&rows[i], &rows[j]).sqrt();
                let yi: Vec<f64> = y.points().row(i).to_vec();
                let yj: Vec<f64> = y.points().row(j).to_vec();
                let proj = squared_distance(&yi, &yj).sqrt();
                let ratio = proj / orig;
                assert!(
                    (0.5..=1.5).contains(&ratio),
                    "pair ({i},{j}) distorted by {ratio}"
                );
            }
        }
    }

    #[test]
    fn squared_norm_preserved_in_expectation() {
        // E‖y‖² = ‖x‖²: Monte-Carlo over G at p = 512, within 2%.
        let m = 24;
        let mut gen = RngStream::named(9, "jl-norm-row").rng();
        let entries: Vec<(usize, usize, f64)> =
            (0..m).map(|c| (0, c, gen.gen::<f64>() + 0.1)).collect();
        let x = SparseRatings::new(1, m, entries, MaskSemantics::ImplicitZeros).unwrap();
        let x_norm2: f64 = x.dense_row(0).unwrap().iter().map(|v| v * v).sum();
        let root = RngStream::named(9, "jl-norm");
        let trials = 200;
        let mean_y_norm2: f64 = (0..trials)
            .map(|t| {
                let y = jl_project(&x, 512, &root.child(t.to_string())).unwrap();
                y.points().row(0).iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            / trials as f64;
        assert!(
            (mean_y_norm2 - x_norm2).abs() / x_norm2 < 0.02,
            "E‖y‖² = {mean_y_norm2} vs ‖x‖² = {x_norm2}"
        );
    }
}
