//! The learned generative model: an ensemble of delta-predicting transition
//! nets (treated as posterior samples over model parameters) plus a single
//! unit-variance reward net, wrapped with the normalizer that maps between
//! environment units and network units.

use crate::error::{FeefError, Result};
use crate::math::gaussian::{DiagonalGaussian, VARIANCE_FLOOR};
use crate::math::loss::softplus;
use crate::math::net::{Activation, DenseNet, NetScratch};
use crate::model::normalizer::Normalizer;

#[derive(Debug, Clone)]
pub struct TransitionEnsemble {
    members: Vec<DenseNet>,
    state_dim: usize,
    action_dim: usize,
}

impl TransitionEnsemble {
    /// `members` must all map d_s + d_a inputs to 2·d_s outputs.
    pub fn new(members: Vec<DenseNet>, state_dim: usize, action_dim: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(FeefError::EnsembleTooSmall(0));
        }
        for net in &members {
            if net.input_dim() != state_dim + action_dim || net.output_dim() != 2 * state_dim {
                return Err(FeefError::DimensionMismatch(format!(
                    "ensemble member maps {} -> {}, expected {} -> {}",
                    net.input_dim(),
                    net.output_dim(),
                    state_dim + action_dim,
                    2 * state_dim
                )));
            }
        }
        Ok(Self {
            members,
            state_dim,
            action_dim,
        })
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn member(&self, index: usize) -> Result<&DenseNet> {
        self.members.get(index).ok_or(FeefError::MemberOutOfRange {
            index,
            size: self.members.len(),
        })
    }

    pub fn members(&self) -> &[DenseNet] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [DenseNet] {
        &mut self.members
    }
}

#[derive(Debug, Clone)]
pub struct RewardModel {
    net: DenseNet,
}

impl RewardModel {
    /// `net` must map d_s inputs to a single output (the reward mean).
    pub fn new(net: DenseNet) -> Result<Self> {
        if net.output_dim() != 1 {
            return Err(FeefError::DimensionMismatch(format!(
                "reward net outputs {} values, expected 1",
                net.output_dim()
            )));
        }
        Ok(Self { net })
    }

    pub fn net(&self) -> &DenseNet {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut DenseNet {
        &mut self.net
    }
}

/// Per-thread workspace for model predictions: forward-pass buffers and the
/// normalized-input staging area. Create one per worker, reuse across calls.
#[derive(Debug, Default, Clone)]
pub struct ModelCtx {
    transition_scratch: NetScratch,
    reward_scratch: NetScratch,
    input: Vec<f64>,
}

/// Read-only prediction interface the rollout and planner run against.
/// Implementations must be safe for concurrent use from multiple threads,
/// with per-thread `ModelCtx` workspaces.
pub trait DynamicsModel: Sync {
    fn num_members(&self) -> usize;
    fn state_dim(&self) -> usize;
    fn action_dim(&self) -> usize;

    /// Member `member`'s predictive Gaussian over the next state, in
    /// environment units.
    fn transition(
        &self,
        ctx: &mut ModelCtx,
        member: usize,
        state: &[f64],
        action: &[f64],
    ) -> Result<DiagonalGaussian>;

    /// Predictive Gaussian over the reward at `state` (dimension 1,
    /// variance exactly 1).
    fn reward(&self, ctx: &mut ModelCtx, state: &[f64]) -> Result<DiagonalGaussian>;
}

#[derive(Debug, Clone)]
pub struct WorldModel {
    pub ensemble: TransitionEnsemble,
    pub reward: RewardModel,
    pub normalizer: Normalizer,
}

impl WorldModel {
    /// Network dims for a transition member given widths.
    pub fn transition_dims(d_s: usize, d_a: usize, hidden_width: usize, hidden_layers: usize) -> Vec<usize> {
        let mut dims = vec![d_s + d_a];
        dims.extend(std::iter::repeat(hidden_width).take(hidden_layers));
        dims.push(2 * d_s);
        dims
    }

    /// Network dims for the reward net given widths.
    pub fn reward_dims(d_s: usize, hidden_width: usize, hidden_layers: usize) -> Vec<usize> {
        let mut dims = vec![d_s];
        dims.extend(std::iter::repeat(hidden_width).take(hidden_layers));
        dims.push(1);
        dims
    }

    pub const TRANSITION_ACTIVATION: Activation = Activation::Swish;
    pub const REWARD_ACTIVATION: Activation = Activation::Relu;
}

/// Member `member_index`'s next-state Gaussian for (`state`, `action`).
///
/// The member net sees the normalized state/action pair and predicts the
/// normalized state delta: mean = state + std·Δμ, variance = std²·Δσ²
/// (softplus-floored). The delta parameterization makes an untrained
/// zero-weight member predict "no change" exactly.
pub fn predict_transition(
    model: &WorldModel,
    ctx: &mut ModelCtx,
    member_index: usize,
    state: &[f64],
    action: &[f64],
) -> Result<DiagonalGaussian> {
    let (d_s, d_a) = (model.ensemble.state_dim, model.ensemble.action_dim);
    if state.len() != d_s || action.len() != d_a {
        return Err(FeefError::DimensionMismatch(format!(
            "predict_transition: got state[{}], action[{}], expected [{}], [{}]",
            state.len(),
            action.len(),
            d_s,
            d_a
        )));
    }
    let net = model.ensemble.member(member_index)?;
    ctx.input.resize(d_s + d_a, 0.0);
    let (zs, za) = ctx.input.split_at_mut(d_s);
    model.normalizer.normalize_state_into(state, zs);
    model.normalizer.normalize_action_into(action, za);
    let out = net.forward_scratch(&ctx.input, &mut ctx.transition_scratch)?;
    let std = model.normalizer.state_std();
    let mut mean = vec![0.0; d_s];
    let mut var = vec![0.0; d_s];
    for i in 0..d_s {
        mean[i] = state[i] + out[i] * std[i];
        var[i] = (softplus(out[d_s + i]) + VARIANCE_FLOOR) * std[i] * std[i];
    }
    Ok(DiagonalGaussian::new(mean, var))
}

/// Reward Gaussian at `state`: N(net(normalized state), 1).
pub fn predict_reward(
    model: &WorldModel,
    ctx: &mut ModelCtx,
    state: &[f64],
) -> Result<DiagonalGaussian> {
    let d_s = model.ensemble.state_dim;
    if state.len() != d_s {
        return Err(FeefError::DimensionMismatch(format!(
            "predict_reward: got state[{}], expected [{}]",
            state.len(),
            d_s
        )));
    }
    ctx.input.resize(d_s, 0.0);
    model.normalizer.normalize_state_into(state, &mut ctx.input);
    let out = model
        .reward
        .net
        .forward_scratch(&ctx.input, &mut ctx.reward_scratch)?;
    Ok(DiagonalGaussian::new(vec![out[0]], vec![1.0]))
}

impl DynamicsModel for WorldModel {
    fn num_members(&self) -> usize {
        self.ensemble.size()
    }

    fn state_dim(&self) -> usize {
        self.ensemble.state_dim
    }

    fn action_dim(&self) -> usize {
        self.ensemble.action_dim
    }

    fn transition(
        &self,
        ctx: &mut ModelCtx,
        member: usize,
        state: &[f64],
        action: &[f64],
    ) -> Result<DiagonalGaussian> {
        predict_transition(self, ctx, member, state, action)
    }

    fn reward(&self, ctx: &mut ModelCtx, state: &[f64]) -> Result<DiagonalGaussian> {
        predict_reward(self, ctx, state)
    }
}
