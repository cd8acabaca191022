//! Factor models and privatized prototype sets.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::core::{EntityId, Epsilon};
use crate::error::{Error, Result};

/// Non-negative rank-ℓ factorization X ≈ U Vᵀ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    u: Array2<f64>,
    v: Array2<f64>,
    rank: usize,
    lambda: f64,
}

impl FactorModel {
    pub fn new(u: Array2<f64>, v: Array2<f64>, lambda: f64) -> Result<Self> {
        if u.ncols() != v.ncols() {
            return Err(Error::parameter(format!(
                "U has {} columns but V has {}",
                u.ncols(),
                v.ncols()
            )));
        }
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::parameter(format!("λ must be finite and ≥ 0, got {lambda}")));
        }
        for m in [&u, &v] {
            if m.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::parameter(
                    "factor matrices must be finite and non-negative".to_string(),
                ));
            }
        }
        let rank = u.ncols();
        Ok(FactorModel { u, v, rank, lambda })
    }

    pub fn user_factors(&self) -> &Array2<f64> {
        &self.u
    }

    pub fn item_factors(&self) -> &Array2<f64> {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Predicted score u_i · v_j.
    pub fn score(&self, row: usize, col: usize) -> f64 {
        let u = self.u.row(row);
        let v = self.v.row(col);
        u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
    }

    /// Dense reconstruction X̂ = U Vᵀ. Non-negative by construction.
    pub fn predict(&self) -> Array2<f64> {
        self.u.dot(&self.v.t())
    }

    /// Predicted scores for every item, for one user row.
    pub fn predict_row(&self, row: usize) -> Vec<f64> {
        let u = self.u.row(row);
        (0..self.v.nrows())
            .map(|j| {
                self.v
                    .row(j)
                    .iter()
                    .zip(u.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// k privatized row-prototypes of one entity's matrix, clamped to [0, Λ].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototypeSet {
    prototypes: Array2<f64>,
    k: usize,
    epsilon_spent: Epsilon,
    delta: f64,
    entity_id: EntityId,
    lambda_bound: f64,
}

impl PrototypeSet {
    pub fn new(
        prototypes: Array2<f64>,
        epsilon_spent: Epsilon,
        delta: f64,
        entity_id: EntityId,
        lambda_bound: f64,
    ) -> Result<Self> {
        if prototypes.nrows() == 0 {
            return Err(Error::parameter("prototype set must be nonempty".to_string()));
        }
        if prototypes
            .iter()
            .any(|&x| !x.is_finite() || x < 0.0 || x > lambda_bound)
        {
            return Err(Error::parameter(format!(
                "prototype entries must lie in [0, {lambda_bound}]"
            )));
        }
        let k = prototypes.nrows();
        Ok(PrototypeSet {
            prototypes,
            k,
            epsilon_spent,
            delta,
            entity_id,
            lambda_bound,
        })
    }

    pub fn prototypes(&self) -> &Array2<f64> {
        &self.prototypes
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.prototypes.ncols()
    }

    pub fn epsilon_spent(&self) -> Epsilon {
        self.epsilon_spent
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn entity_id(&self) -> &EntityId {
        &self.entity_id
    }

    pub fn lambda_bound(&self) -> f64 {
        self.lambda_bound
    }
}
