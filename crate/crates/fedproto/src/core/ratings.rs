//! Partially observed non-negative user×item interaction matrices.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::core::FactorModel;
use crate::error::{Error, Result};

/// What an absent cell means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskSemantics {
    /// Count data: absence is a true zero (every cell is observed).
    ImplicitZeros,
    /// Rating data: absence is missing (only stored entries are observed).
    ExplicitMissing,
}

impl MaskSemantics {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskSemantics::ImplicitZeros => "implicit-zeros",
            MaskSemantics::ExplicitMissing => "explicit-missing",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "implicit-zeros" => Ok(MaskSemantics::ImplicitZeros),
            "explicit-missing" => Ok(MaskSemantics::ExplicitMissing),
            other => Err(Error::data(format!("unknown mask semantics '{other}'"))),
        }
    }
}

/// Sparse non-negative interaction matrix with value bound Λ and row-sparsity
/// bound s.
///
/// Entries are stored row-major sorted and deduplicated. `holdout` lists cells
/// that have been removed by a test split: under implicit-zero semantics such
/// a cell must become *unobserved*, not an observed zero, so the mask flag
/// alone cannot express it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRatings {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
    row_offsets: Vec<usize>,
    lambda_bound: f64,
    sparsity: usize,
    mask: MaskSemantics,
    holdout: Vec<(usize, usize)>,
}

impl SparseRatings {
    /// Build a matrix, computing Λ (max value) and s (max row nonzeros) from
    /// the data.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        entries: Vec<(usize, usize, f64)>,
        mask: MaskSemantics,
    ) -> Result<Self> {
        let lambda = entries.iter().fold(0.0f64, |m, &(_, _, v)| m.max(v));
        if !entries.is_empty() && lambda <= 0.0 {
            return Err(Error::data(
                "entries present but all zero: Λ must be positive".to_string(),
            ));
        }
        Self::assemble(n_rows, n_cols, entries, lambda, None, mask)
    }

    /// Build a matrix with explicit Λ and s bounds (e.g. from a sidecar file).
    pub fn with_bounds(
        n_rows: usize,
        n_cols: usize,
        entries: Vec<(usize, usize, f64)>,
        lambda_bound: f64,
        sparsity: usize,
        mask: MaskSemantics,
    ) -> Result<Self> {
        Self::assemble(n_rows, n_cols, entries, lambda_bound, Some(sparsity), mask)
    }

    fn assemble(
        n_rows: usize,
        n_cols: usize,
        mut entries: Vec<(usize, usize, f64)>,
        lambda_bound: f64,
        sparsity: Option<usize>,
        mask: MaskSemantics,
    ) -> Result<Self> {
        if lambda_bound < 0.0 || !lambda_bound.is_finite() {
            return Err(Error::data(format!("Λ must be finite and ≥ 0, got {lambda_bound}")));
        }
        entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_nnz = vec![0usize; n_rows];
        for (i, &(r, c, v)) in entries.iter().enumerate() {
            if r >= n_rows || c >= n_cols {
                return Err(Error::data(format!(
                    "entry ({r},{c}) out of range for {n_rows}×{n_cols} matrix"
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(Error::data(format!("entry ({r},{c}) has invalid value {v}")));
            }
            if v > lambda_bound {
                return Err(Error::data(format!(
                    "entry ({r},{c}) value {v} exceeds Λ = {lambda_bound}"
                )));
            }
            if i > 0 {
                let prev = entries[i - 1];
                if prev.0 == r && prev.1 == c {
                    return Err(Error::data(format!("duplicate entry at ({r},{c})")));
                }
            }
            if v != 0.0 {
                row_nnz[r] += 1;
            }
        }
        let max_nnz = row_nnz.iter().copied().max().unwrap_or(0);
        let sparsity = match sparsity {
            Some(s) => {
                if max_nnz > s {
                    return Err(Error::data(format!(
                        "a row has {max_nnz} nonzeros, exceeding declared s = {s}"
                    )));
                }
                s
            }
            None => max_nnz,
        };
        let mut row_offsets = vec![0usize; n_rows + 1];
        for &(r, _, _) in &entries {
            row_offsets[r + 1] += 1;
        }
        for r in 0..n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Ok(SparseRatings {
            n_rows,
            n_cols,
            entries,
            row_offsets,
            lambda_bound,
            sparsity,
            mask,
            holdout: Vec::new(),
        })
    }

    /// Mark cells as held out (removed from observation). The cells must not
    /// collide with stored entries.
    pub fn with_holdout(mut self, mut cells: Vec<(usize, usize)>) -> Result<Self> {
        let stored: HashSet<(usize, usize)> =
            self.entries.iter().map(|&(r, c, _)| (r, c)).collect();
        cells.sort_unstable();
        cells.dedup();
        for &(r, c) in &cells {
            if r >= self.n_rows || c >= self.n_cols {
                return Err(Error::data(format!("holdout cell ({r},{c}) out of range")));
            }
            if stored.contains(&(r, c)) {
                return Err(Error::data(format!(
                    "holdout cell ({r},{c}) collides with a stored entry"
                )));
            }
        }
        self.holdout = cells;
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn lambda_bound(&self) -> f64 {
        self.lambda_bound
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn mask(&self) -> MaskSemantics {
        self.mask
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn holdout(&self) -> &[(usize, usize)] {
        &self.holdout
    }

    /// Stored entries of one row.
    pub fn row_entries(&self, row: usize) -> &[(usize, usize, f64)] {
        &self.entries[self.row_offsets[row]..self.row_offsets[row + 1]]
    }

    /// Value at a cell if the cell is observed under this matrix's semantics.
    pub fn value(&self, row: usize, col: usize) -> Option<f64> {
        let stored = self
            .row_entries(row)
            .binary_search_by(|&(_, c, _)| c.cmp(&col))
            .ok()
            .map(|i| self.row_entries(row)[i].2);
        match (stored, self.mask) {
            (Some(v), _) => Some(v),
            (None, MaskSemantics::ImplicitZeros) => {
                if self.holdout.binary_search(&(row, col)).is_ok() {
                    None
                } else {
                    Some(0.0)
                }
            }
            (None, MaskSemantics::ExplicitMissing) => None,
        }
    }

    /// Zero-filled dense copy of one row.
    pub fn dense_row(&self, row: usize) -> Result<Vec<f64>> {
        if row >= self.n_rows {
            return Err(Error::parameter(format!(
                "row {row} out of range for {} rows",
                self.n_rows
            )));
        }
        let mut out = vec![0.0; self.n_cols];
        for &(_, c, v) in self.row_entries(row) {
            out[c] = v;
        }
        Ok(out)
    }

    /// Observed cells of one row, as (col, value). Implicit semantics yields
    /// every column except held-out cells; explicit semantics yields stored
    /// entries only.
    pub fn observed_row(&self, row: usize) -> Vec<(usize, f64)> {
        match self.mask {
            MaskSemantics::ExplicitMissing => {
                self.row_entries(row).iter().map(|&(_, c, v)| (c, v)).collect()
            }
            MaskSemantics::ImplicitZeros => {
                let mut dense = vec![0.0; self.n_cols];
                for &(_, c, v) in self.row_entries(row) {
                    dense[c] = v;
                }
                let held: HashSet<usize> = self
                    .holdout
                    .iter()
                    .filter(|&&(r, _)| r == row)
                    .map(|&(_, c)| c)
                    .collect();
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(c, _)| !held.contains(c))
                    .collect()
            }
        }
    }

    /// Count of observed cells (the N of the factorization objective).
    pub fn observed_count(&self) -> usize {
        match self.mask {
            MaskSemantics::ExplicitMissing => self.entries.len(),
            MaskSemantics::ImplicitZeros => self.n_rows * self.n_cols - self.holdout.len(),
        }
    }
}

/// RMSE of a model against explicit (row, col, value) triples.
pub fn rmse_over(model: &FactorModel, triples: &[(usize, usize, f64)]) -> Result<f64> {
    if triples.is_empty() {
        return Err(Error::parameter("empty evaluation set".to_string()));
    }
    let mut acc = 0.0;
    for &(r, c, x) in triples {
        let d = x - model.score(r, c);
        acc += d * d;
    }
    Ok((acc / triples.len() as f64).sqrt())
}

/// RMSE of a model against observed cells of `target` at the given positions.
pub fn masked_rmse(
    model: &FactorModel,
    target: &SparseRatings,
    entry_set: &[(usize, usize)],
) -> Result<f64> {
    if entry_set.is_empty() {
        return Err(Error::parameter("empty evaluation set".to_string()));
    }
    let mut triples = Vec::with_capacity(entry_set.len());
    for &(r, c) in entry_set {
        if r >= target.n_rows() || c >= target.n_cols() {
            return Err(Error::parameter(format!("entry ({r},{c}) out of range")));
        }
        let x = target.value(r, c).ok_or_else(|| {
            Error::parameter(format!("entry ({r},{c}) is not observed in the target"))
        })?;
        triples.push((r, c, x));
    }
    rmse_over(model, &triples)
}
