//! Per-episode model training. Every call is a cold start: fresh network
//! initializations, a refit normalizer, and one bootstrap resample of the
//! buffer per ensemble member, so the posterior samples stay decorrelated
//! as the dataset grows.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{FeefError, Result};
use crate::math::adam::AdamState;
use crate::math::loss::{nll_loss, nll_loss_and_grads, LossHead};
use crate::math::net::{DenseNet, NetScratch};
use crate::model::buffer::ReplayBuffer;
use crate::model::ensemble::{RewardModel, TransitionEnsemble, WorldModel};
use crate::model::normalizer::Normalizer;
use crate::rng::{derive_seed_path, rng_from_seed, Rng};

const TAG_MEMBER: u64 = 0x7472616e73; // transition member streams
const TAG_REWARD: u64 = 0x726577;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub ensemble_size: usize,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub minibatch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 5,
            hidden_width: 400,
            hidden_layers: 2,
            epochs: 100,
            learning_rate: 1e-3,
            minibatch: 64,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size == 0 {
            return Err(FeefError::EnsembleTooSmall(0));
        }
        if self.hidden_width == 0 || self.hidden_layers == 0 {
            return Err(FeefError::InvalidConfig(
                "hidden_width and hidden_layers must be positive".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(FeefError::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.minibatch == 0 {
            return Err(FeefError::InvalidConfig("minibatch must be positive".into()));
        }
        Ok(())
    }
}

/// Final mean NLL per trained net, evaluated on its own training set.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub member_nll: Vec<f64>,
    pub reward_nll: f64,
}

pub(crate) fn member_init_seed(base: u64, member: usize) -> u64 {
    derive_seed_path(base, &[TAG_MEMBER, member as u64])
}

pub(crate) fn reward_init_seed(base: u64) -> u64 {
    derive_seed_path(base, &[TAG_REWARD])
}

/// Train one net on `dataset` index views into (inputs, targets) for the
/// configured epochs. `indices` is the net's own (possibly resampled) view
/// of the data; minibatches are reshuffled every epoch from `rng`.
fn fit_net(
    net: &mut DenseNet,
    head: LossHead,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    indices: &mut Vec<usize>,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<f64> {
    let mut adam = AdamState::new(net.param_count(), config.learning_rate);
    let mut grads = vec![0.0; net.param_count()];
    let mut scratch = NetScratch::default();
    let mut batch: Vec<(&[f64], &[f64])> = Vec::with_capacity(config.minibatch);
    for _ in 0..config.epochs {
        indices.shuffle(rng);
        for chunk in indices.chunks(config.minibatch) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| (inputs[i].as_slice(), targets[i].as_slice())));
            nll_loss_and_grads(net, head, &batch, &mut scratch, &mut grads)?;
            adam.step(net.params_mut(), &grads)?;
        }
    }
    let full: Vec<(&[f64], &[f64])> = indices
        .iter()
        .map(|&i| (inputs[i].as_slice(), targets[i].as_slice()))
        .collect();
    nll_loss(net, head, &full)
}

/// Cold-start training of the full generative model on `buffer`.
///
/// The normalizer is refit on the whole buffer; each ensemble member gets a
/// fresh initialization and its own bootstrap resample (with replacement,
/// same size as the buffer); the reward model trains on the full buffer.
/// All randomness flows from one base seed drawn off `rng`, with
/// per-network derived streams, so members can train in parallel and the
/// result is reproducible regardless of thread count.
pub fn train_world_model(
    buffer: &ReplayBuffer,
    config: &TrainConfig,
    rng: &mut Rng,
) -> Result<(WorldModel, TrainReport)> {
    config.validate()?;
    if buffer.is_empty() {
        return Err(FeefError::EmptyBuffer);
    }
    let base = rng.gen::<u64>();
    let d_s = buffer.state_dim().unwrap();
    let d_a = buffer.action_dim().unwrap();
    let n = buffer.len();
    let normalizer = Normalizer::fit(buffer);

    // normalized training pairs, shared read-only across member threads
    let std_s = normalizer.state_std().to_vec();
    let mut trans_inputs = Vec::with_capacity(n);
    let mut trans_targets = Vec::with_capacity(n);
    let mut reward_inputs = Vec::with_capacity(n);
    let mut reward_targets = Vec::with_capacity(n);
    for t in buffer.iter() {
        let mut input = vec![0.0; d_s + d_a];
        let (zs, za) = input.split_at_mut(d_s);
        normalizer.normalize_state_into(&t.state, zs);
        normalizer.normalize_action_into(&t.action, za);
        trans_inputs.push(input);
        let delta: Vec<f64> = (0..d_s)
            .map(|i| (t.next_state[i] - t.state[i]) / std_s[i])
            .collect();
        trans_targets.push(delta);
        reward_inputs.push(normalizer.normalize_state(&t.next_state));
        reward_targets.push(vec![t.reward]);
    }

    let t_dims = WorldModel::transition_dims(d_s, d_a, config.hidden_width, config.hidden_layers);
    let trained: Vec<Result<(DenseNet, f64)>> = (0..config.ensemble_size)
        .into_par_iter()
        .map(|m| {
            let mut rng = rng_from_seed(member_init_seed(base, m));
            let mut net = DenseNet::new(&t_dims, WorldModel::TRANSITION_ACTIVATION, &mut rng);
            let mut indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let nll = fit_net(
                &mut net,
                LossHead::Gaussian,
                &trans_inputs,
                &trans_targets,
                &mut indices,
                config,
                &mut rng,
            )?;
            Ok((net, nll))
        })
        .collect();
    let mut members = Vec::with_capacity(config.ensemble_size);
    let mut member_nll = Vec::with_capacity(config.ensemble_size);
    for r in trained {
        let (net, nll) = r?;
        if !nll.is_finite() {
            return Err(FeefError::NonFiniteLoss { sample: members.len() });
        }
        members.push(net);
        member_nll.push(nll);
    }

    let r_dims = WorldModel::reward_dims(d_s, config.hidden_width, config.hidden_layers);
    let mut reward_rng = rng_from_seed(reward_init_seed(base));
    let mut reward_net = DenseNet::new(&r_dims, WorldModel::REWARD_ACTIVATION, &mut reward_rng);
    let mut reward_indices: Vec<usize> = (0..n).collect();
    let reward_nll = fit_net(
        &mut reward_net,
        LossHead::FixedUnitVariance,
        &reward_inputs,
        &reward_targets,
        &mut reward_indices,
        config,
        &mut reward_rng,
    )?;

    let model = WorldModel {
        ensemble: TransitionEnsemble::new(members, d_s, d_a)?,
        reward: RewardModel::new(reward_net)?,
        normalizer,
    };
    Ok((model, TrainReport { member_nll, reward_nll }))
}

/// Untrained model with the same cold-start initialization `train_world_model`
/// would produce for `base` (exposed for the cold-start invariant tests and
/// for building fixture models).
pub fn init_world_model(
    d_s: usize,
    d_a: usize,
    config: &TrainConfig,
    base: u64,
) -> Result<WorldModel> {
    config.validate()?;
    let t_dims = WorldModel::transition_dims(d_s, d_a, config.hidden_width, config.hidden_layers);
    let members = (0..config.ensemble_size)
        .map(|m| {
            let mut rng = rng_from_seed(member_init_seed(base, m));
            DenseNet::new(&t_dims, WorldModel::TRANSITION_ACTIVATION, &mut rng)
        })
        .collect();
    let r_dims = WorldModel::reward_dims(d_s, config.hidden_width, config.hidden_layers);
    let mut reward_rng = rng_from_seed(reward_init_seed(base));
    let reward_net = DenseNet::new(&r_dims, WorldModel::REWARD_ACTIVATION, &mut reward_rng);
    Ok(WorldModel {
        ensemble: TransitionEnsemble::new(members, d_s, d_a)?,
        reward: RewardModel::new(reward_net)?,
        normalizer: Normalizer::identity(d_s, d_a),
    })
}
