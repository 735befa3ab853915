//! Input normalization fitted on the replay buffer. States and actions are
//! shifted/scaled to zero mean and unit variance before the networks;
//! rewards are left raw. Stds are population stds, floored at 1e-6 so
//! constant dimensions stay usable.

use crate::model::buffer::ReplayBuffer;

pub const STD_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    state_mean: Vec<f64>,
    state_std: Vec<f64>,
    action_mean: Vec<f64>,
    action_std: Vec<f64>,
}

fn moments(rows: impl Iterator<Item = Vec<f64>> + Clone, dim: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mean = vec![0.0; dim];
    for row in rows.clone() {
        for (m, v) in mean.iter_mut().zip(&row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; dim];
    for row in rows {
        for ((s, v), m) in var.iter_mut().zip(&row).zip(&mean) {
            let d = v - m;
            *s += d * d;
        }
    }
    let std = var
        .iter()
        .map(|s| (s / n as f64).sqrt().max(STD_FLOOR))
        .collect();
    (mean, std)
}

impl Normalizer {
    /// Pass-through normalizer (mean 0, std 1).
    pub fn identity(d_s: usize, d_a: usize) -> Self {
        Self {
            state_mean: vec![0.0; d_s],
            state_std: vec![1.0; d_s],
            action_mean: vec![0.0; d_a],
            action_std: vec![1.0; d_a],
        }
    }

    /// Fit on every state and action in the buffer. Next-states are included
    /// in the state statistics: they are states too, and the transition
    /// target (the delta) is scaled by the same state std.
    pub fn fit(buffer: &ReplayBuffer) -> Self {
        assert!(!buffer.is_empty(), "cannot fit a normalizer on an empty buffer");
        let d_s = buffer.state_dim().unwrap();
        let d_a = buffer.action_dim().unwrap();
        let states = buffer
            .iter()
            .map(|t| t.state.clone())
            .chain(buffer.iter().map(|t| t.next_state.clone()));
        let (state_mean, state_std) = moments(states, d_s, 2 * buffer.len());
        let actions = buffer.iter().map(|t| t.action.clone());
        let (action_mean, action_std) = moments(actions, d_a, buffer.len());
        Self {
            state_mean,
            state_std,
            action_mean,
            action_std,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.state_mean.len()
    }

    pub fn action_dim(&self) -> usize {
        self.action_mean.len()
    }

    pub fn state_std(&self) -> &[f64] {
        &self.state_std
    }

    pub fn normalize_state_into(&self, state: &[f64], out: &mut [f64]) {
        for i in 0..state.len() {
            out[i] = (state[i] - self.state_mean[i]) / self.state_std[i];
        }
    }

    pub fn normalize_action_into(&self, action: &[f64], out: &mut [f64]) {
        for i in 0..action.len() {
            out[i] = (action[i] - self.action_mean[i]) / self.action_std[i];
        }
    }

    pub fn normalize_state(&self, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; state.len()];
        self.normalize_state_into(state, &mut out);
        out
    }

    pub fn normalize_action(&self, action: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; action.len()];
        self.normalize_action_into(action, &mut out);
        out
    }

    /// Scale a delta expressed in normalized state units back to
    /// environment units (no mean shift: deltas are differences).
    pub fn denormalize_state_delta(&self, delta_norm: &[f64], out: &mut [f64]) {
        for i in 0..delta_norm.len() {
            out[i] = delta_norm[i] * self.state_std[i];
        }
    }

    /// Flat stats layout for checkpointing: state mean, state std,
    /// action mean, action std.
    pub fn flat_stats(&self) -> Vec<f64> {
        let mut v = self.state_mean.clone();
        v.extend_from_slice(&self.state_std);
        v.extend_from_slice(&self.action_mean);
        v.extend_from_slice(&self.action_std);
        v
    }

    pub fn from_flat_stats(d_s: usize, d_a: usize, stats: &[f64]) -> Option<Self> {
        if stats.len() != 2 * d_s + 2 * d_a {
            return None;
        }
        Some(Self {
            state_mean: stats[..d_s].to_vec(),
            state_std: stats[d_s..2 * d_s].to_vec(),
            action_mean: stats[2 * d_s..2 * d_s + d_a].to_vec(),
            action_std: stats[2 * d_s + d_a..].to_vec(),
        })
    }
}
