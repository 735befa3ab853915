//! Diagonal Gaussians and their closed-form divergences.
//!
//! A [`DiagonalGaussian`] is the belief representation used everywhere:
//! predicted next states, predicted rewards, and the planner's policy
//! distribution are all mean/variance pairs with independent dimensions.
//! All entropies and divergences are in nats.

use crate::error::{FeefError, Result};
use rand_distr::StandardNormal;

/// Variances are floored here to keep log terms and KL ratios finite.
pub const VARIANCE_FLOOR: f64 = 1e-6;

pub const LN_2PI: f64 = 1.8378770664093453;

/// Independent Gaussian over `d` dimensions: mean vector plus per-dimension
/// variance (squared units of the mean). Variances are floored at
/// [`VARIANCE_FLOOR`] on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGaussian {
    mean: Vec<f64>,
    variance: Vec<f64>,
}

impl DiagonalGaussian {
    pub fn new(mean: Vec<f64>, variance: Vec<f64>) -> Self {
        assert_eq!(
            mean.len(),
            variance.len(),
            "mean and variance must have the same dimension"
        );
        let variance = variance
            .into_iter()
            .map(|v| if v < VARIANCE_FLOOR { VARIANCE_FLOOR } else { v })
            .collect();
        Self { mean, variance }
    }

    pub fn standard(dim: usize) -> Self {
        Self::new(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().all(|m| m.is_finite()) && self.variance.iter().all(|v| v.is_finite())
    }

    /// Draw one sample, writing into `out`.
    pub fn sample_into(&self, rng: &mut impl rand::Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim());
        for ((o, m), v) in out.iter_mut().zip(&self.mean).zip(&self.variance) {
            let z: f64 = rng.sample(StandardNormal);
            *o = m + v.sqrt() * z;
        }
    }

    pub fn sample(&self, rng: &mut impl rand::Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        out
    }
}

/// KL divergence between two diagonal Gaussians, in nats.
///
/// Sum over dimensions of the univariate closed form
/// `0.5 * (ln(vq/vp) + (vp + (mp - mq)^2) / vq - 1)`.
pub fn gaussian_kl(p: &DiagonalGaussian, q: &DiagonalGaussian) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(FeefError::DimensionMismatch(format!(
            "gaussian_kl: p has dim {}, q has dim {}",
            p.dim(),
            q.dim()
        )));
    }
    let mut kl = 0.0;
    for i in 0..p.dim() {
        let (mp, vp) = (p.mean[i], p.variance[i]);
        let (mq, vq) = (q.mean[i], q.variance[i]);
        let dm = mp - mq;
        kl += 0.5 * ((vq / vp).ln() + (vp + dm * dm) / vq - 1.0);
    }
    // The closed form is nonnegative in exact arithmetic; clamp the float
    // residue so callers can rely on kl >= 0.
    Ok(kl.max(0.0))
}

/// Differential entropy of a diagonal Gaussian: sum of `0.5 * ln(2πe v)`.
pub fn gaussian_entropy(p: &DiagonalGaussian) -> f64 {
    p.variance()
        .iter()
        .map(|v| 0.5 * (LN_2PI + 1.0 + v.ln()))
        .sum()
}

/// Numerically stable softmax. Invariant to adding a constant to all inputs.
///
/// `-inf` entries get weight 0; if every entry is `-inf` the result is
/// uniform (no information to prefer any index).
pub fn softmax_stable(values: &[f64]) -> Vec<f64> {
    assert!(!values.is_empty(), "softmax of empty slice");
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![1.0 / values.len() as f64; values.len()];
    }
    let mut out: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for o in &mut out {
        *o /= sum;
    }
    out
}
