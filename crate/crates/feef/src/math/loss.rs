//! Gaussian negative log-likelihood on top of a [`DenseNet`], with exact
//! analytic gradients.
//!
//! Two head layouts are supported: a full Gaussian head where the net's
//! output is `[mean..., raw_var...]` and the variance is
//! `softplus(raw) + VARIANCE_FLOOR`, and a fixed-unit-variance head where
//! the net predicts only the mean and the loss reduces to squared error
//! plus a constant.

use crate::error::{FeefError, Result};
use crate::math::gaussian::{LN_2PI, VARIANCE_FLOOR};
use crate::math::net::{DenseNet, NetScratch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossHead {
    /// Output is `[mean; d, raw_var; d]`; variance = softplus(raw_var) + floor.
    Gaussian,
    /// Output is `[mean; d]`; variance fixed at 1.
    FixedUnitVariance,
}

impl LossHead {
    /// Target dimension implied by a net output of width `out_dim`.
    pub fn target_dim(self, out_dim: usize) -> usize {
        match self {
            LossHead::Gaussian => out_dim / 2,
            LossHead::FixedUnitVariance => out_dim,
        }
    }
}

/// Numerically stable softplus: ln(1 + e^x).
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// d softplus / dx = sigmoid(x), in the same stable form.
#[inline]
fn softplus_derivative(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Split a Gaussian-head output into (mean, variance) applying the softplus
/// floor. For a unit-variance head the variance is all ones.
pub fn head_moments(head: LossHead, output: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match head {
        LossHead::Gaussian => {
            let d = output.len() / 2;
            let mean = output[..d].to_vec();
            let var = output[d..].iter().map(|&r| softplus(r) + VARIANCE_FLOOR).collect();
            (mean, var)
        }
        LossHead::FixedUnitVariance => (output.to_vec(), vec![1.0; output.len()]),
    }
}

/// Mean negative log-likelihood of `batch` under the net's predictive
/// Gaussian, plus d loss / d params (same flat layout as `net.params()`).
///
/// Inputs are `(input, target)` pairs. The loss is averaged over the batch;
/// gradients match that normalization. A non-finite per-sample loss aborts
/// with the offending sample index rather than poisoning the whole batch.
pub fn nll_loss_and_grads(
    net: &DenseNet,
    head: LossHead,
    batch: &[(&[f64], &[f64])],
    scratch: &mut NetScratch,
    grads: &mut [f64],
) -> Result<f64> {
    if batch.is_empty() {
        return Err(FeefError::EmptyBatch);
    }
    if grads.len() != net.param_count() {
        return Err(FeefError::DimensionMismatch(format!(
            "nll_loss_and_grads: gradient buffer has {} entries, net has {} parameters",
            grads.len(),
            net.param_count()
        )));
    }
    let d = head.target_dim(net.output_dim());
    if d == 0 || (head == LossHead::Gaussian && net.output_dim() % 2 != 0) {
        return Err(FeefError::DimensionMismatch(format!(
            "nll_loss_and_grads: output dim {} incompatible with head {:?}",
            net.output_dim(),
            head
        )));
    }
    grads.iter_mut().for_each(|g| *g = 0.0);
    let inv_n = 1.0 / batch.len() as f64;
    let mut total = 0.0;
    let mut out_grad = vec![0.0; net.output_dim()];
    for (sample, (input, target)) in batch.iter().enumerate() {
        if target.len() != d {
            return Err(FeefError::DimensionMismatch(format!(
                "nll_loss_and_grads: sample {} target dim {} != {}",
                sample,
                target.len(),
                d
            )));
        }
        let out = net.forward_scratch(input, scratch)?;
        let mut sample_loss: f64 = 0.0;
        match head {
            LossHead::Gaussian => {
                for j in 0..d {
                    let mean = out[j];
                    let raw = out[d + j];
                    let var = softplus(raw) + VARIANCE_FLOOR;
                    let err = mean - target[j];
                    sample_loss += 0.5 * (LN_2PI + var.ln() + err * err / var);
                    out_grad[j] = inv_n * err / var;
                    // d/d raw [0.5 ln v + 0.5 e²/v] with v = softplus(raw)+floor
                    out_grad[d + j] =
                        inv_n * 0.5 * (1.0 / var - err * err / (var * var)) * softplus_derivative(raw);
                }
            }
            LossHead::FixedUnitVariance => {
                for j in 0..d {
                    let err = out[j] - target[j];
                    sample_loss += 0.5 * (LN_2PI + err * err);
                    out_grad[j] = inv_n * err;
                }
            }
        }
        if !sample_loss.is_finite() {
            return Err(FeefError::NonFiniteLoss { sample });
        }
        total += sample_loss;
        net.backward_accumulate(&out_grad, scratch, grads);
    }
    Ok(total * inv_n)
}

/// Loss only, for finite-difference checks and validation curves.
pub fn nll_loss(net: &DenseNet, head: LossHead, batch: &[(&[f64], &[f64])]) -> Result<f64> {
    if batch.is_empty() {
        return Err(FeefError::EmptyBatch);
    }
    let d = head.target_dim(net.output_dim());
    let mut scratch = NetScratch::default();
    let mut total = 0.0;
    for (sample, (input, target)) in batch.iter().enumerate() {
        let out = net.forward_scratch(input, &mut scratch)?;
        let mut sample_loss: f64 = 0.0;
        match head {
            LossHead::Gaussian => {
                for j in 0..d {
                    let var = softplus(out[d + j]) + VARIANCE_FLOOR;
                    let err = out[j] - target[j];
                    sample_loss += 0.5 * (LN_2PI + var.ln() + err * err / var);
                }
            }
            LossHead::FixedUnitVariance => {
                for j in 0..d {
                    let err = out[j] - target[j];
                    sample_loss += 0.5 * (LN_2PI + err * err);
                }
            }
        }
        if !sample_loss.is_finite() {
            return Err(FeefError::NonFiniteLoss { sample });
        }
        total += sample_loss;
    }
    Ok(total / batch.len() as f64)
}
