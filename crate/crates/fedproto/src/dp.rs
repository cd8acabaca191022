//! Primitive differentially private mechanisms: Laplace and Gumbel noise and
//! the exponential mechanism, in single-sample and one-shot top-k form.
//!
//! All sampling goes through inverse-CDF transforms of the uniform stream so
//! that a given `(seed, stream_id)` reproduces bit-identical draws on every
//! platform. Passing an infinite [`Epsilon`] selects the noiseless limit
//! (argmax / exact top-k); that mode exists for oracle tests and is rejected
//! by the federation layer outside of tests.

use rand::distributions::Open01;
use rand::Rng;

use crate::core::{Epsilon, RngStream};
use crate::error::{Error, Result};

/// Outcome of one mechanism invocation together with the budget it charged.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismResult<T> {
    pub value: T,
    pub epsilon_charged: Epsilon,
    pub mechanism_name: &'static str,
}

fn check_scale(scale: f64) -> Result<()> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::parameter(format!(
            "noise scale must be finite and positive, got {scale}"
        )));
    }
    Ok(())
}

/// One draw from the zero-mean Laplace distribution with the given scale.
pub fn laplace(scale: f64, rng: &RngStream) -> Result<f64> {
    check_scale(scale)?;
    Ok(laplace_from(&mut rng.rng(), scale))
}

/// `n` independent Laplace draws from one stream.
pub fn laplace_many(scale: f64, n: usize, rng: &RngStream) -> Result<Vec<f64>> {
    check_scale(scale)?;
    let mut gen = rng.rng();
    Ok((0..n).map(|_| laplace_from(&mut gen, scale)).collect())
}

pub(crate) fn laplace_from<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    let p = u - 0.5;
    -scale * p.signum() * (1.0 - 2.0 * p.abs()).ln()
}

/// One draw from the Gumbel distribution with density
/// p(y; b) = (1/b)·exp(−(y/b + e^(−y/b))).
pub fn gumbel(scale: f64, rng: &RngStream) -> Result<f64> {
    check_scale(scale)?;
    Ok(gumbel_from(&mut rng.rng(), scale))
}

/// `n` independent Gumbel draws from one stream.
pub fn gumbel_many(scale: f64, n: usize, rng: &RngStream) -> Result<Vec<f64>> {
    check_scale(scale)?;
    let mut gen = rng.rng();
    Ok((0..n).map(|_| gumbel_from(&mut gen, scale)).collect())
}

pub(crate) fn gumbel_from<R: Rng>(rng: &mut R, scale: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    -scale * (-u.ln()).ln()
}

fn check_utilities(utilities: &[f64]) -> Result<()> {
    if utilities.is_empty() {
        return Err(Error::parameter("utilities must be nonempty".to_string()));
    }
    if let Some(bad) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(Error::parameter(format!("non-finite utility {bad}")));
    }
    Ok(())
}

fn check_sensitivity(sensitivity: f64) -> Result<()> {
    if !sensitivity.is_finite() || sensitivity <= 0.0 {
        return Err(Error::parameter(format!(
            "sensitivity must be finite and positive, got {sensitivity}"
        )));
    }
    Ok(())
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Exponential mechanism: returns index i with probability
/// ∝ exp(ε·q_i / (2Δq)). Infinite ε returns the argmax (first on ties).
pub fn exp_mechanism_sample(
    utilities: &[f64],
    sensitivity: f64,
    epsilon: Epsilon,
    rng: &RngStream,
) -> Result<MechanismResult<usize>> {
    check_utilities(utilities)?;
    check_sensitivity(sensitivity)?;
    let value = if epsilon.is_infinite() {
        argmax(utilities)
    } else {
        let coeff = epsilon.value() / (2.0 * sensitivity);
        let max_w = utilities
            .iter()
            .map(|q| q * coeff)
            .fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = utilities.iter().map(|q| (q * coeff - max_w).exp()).collect();
        let total: f64 = weights.iter().sum();
        let u: f64 = rng.rng().sample(Open01);
        let target = u * total;
        let mut acc = 0.0;
        let mut chosen = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if target < acc {
                chosen = i;
                break;
            }
        }
        chosen
    };
    Ok(MechanismResult {
        value,
        epsilon_charged: epsilon,
        mechanism_name: "exp_mechanism_sample",
    })
}

/// One-shot Gumbel top-k: adds independent Gumbel noise of scale 2kΔq/ε to
/// each utility and returns the indices of the k largest noisy values,
/// largest first. Distributionally this equals k sequential
/// exponential-mechanism selections without replacement at ε/k each.
pub fn exp_mechanism_top_k(
    utilities: &[f64],
    sensitivity: f64,
    epsilon: Epsilon,
    k: usize,
    rng: &RngStream,
) -> Result<MechanismResult<Vec<usize>>> {
    check_utilities(utilities)?;
    check_sensitivity(sensitivity)?;
    if k > utilities.len() {
        return Err(Error::parameter(format!(
            "k = {k} exceeds domain size {}",
            utilities.len()
        )));
    }
    let noisy: Vec<f64> = if epsilon.is_infinite() {
        utilities.to_vec()
    } else {
        let scale = 2.0 * k as f64 * sensitivity / epsilon.value();
        let mut gen = rng.rng();
        utilities
            .iter()
            .map(|q| q + gumbel_from(&mut gen, scale))
            .collect()
    };
    let mut order: Vec<usize> = (0..noisy.len()).collect();
    order.sort_by(|&a, &b| noisy[b].partial_cmp(&noisy[a]).unwrap().then(a.cmp(&b)));
    order.truncate(k);
    Ok(MechanismResult {
        value: order,
        epsilon_charged: epsilon,
        mechanism_name: "exp_mechanism_top_k",
    })
}
