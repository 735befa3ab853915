//! Imagined futures under the learned model. One particle per ensemble
//! member, propagated through that member only, so each trajectory stays
//! coherent with a single posterior sample of the model parameters.

use crate::error::{FeefError, Result};
use crate::math::gaussian::DiagonalGaussian;
use crate::model::ensemble::{DynamicsModel, ModelCtx};
use crate::rng::{derive_seed_path, rng_from_seed};

/// Stream tag for particle sampling at (step, member).
pub(crate) const TAG_PARTICLE: u64 = 0x706172;

/// How particles advance through a member's predictive Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// Draw the next particle from the Gaussian (stream derived from the
    /// candidate seed and the absolute step/member indices).
    Sample,
    /// Take the mean. Deterministic; for tests and diagnostics.
    Mean,
}

/// One imagined step: per member, the predictive next-state Gaussian, the
/// particle drawn from it, and the reward Gaussian at that particle.
#[derive(Debug, Clone)]
pub struct RolloutStep {
    pub next_gaussians: Vec<DiagonalGaussian>,
    pub particles: Vec<Vec<f64>>,
    pub reward_gaussians: Vec<DiagonalGaussian>,
}

#[derive(Debug, Clone)]
pub struct BeliefRollout {
    /// Per-member start states (identical when starting from an observation).
    pub starts: Vec<Vec<f64>>,
    /// One entry per completed step; shorter than the policy if truncated.
    pub steps: Vec<RolloutStep>,
    /// Set when a member's prediction went non-finite; scoring treats the
    /// whole candidate as invalid rather than aborting the planner.
    pub truncated: bool,
}

impl BeliefRollout {
    /// Per-member particles after the last completed step.
    pub fn final_particles(&self) -> &[Vec<f64>] {
        self.steps.last().map_or(&self.starts, |s| &s.particles)
    }
}

/// Roll `actions` (row-major, `len == H·d_a`) forward from one shared start
/// state. See [`rollout_from`] for the per-member variant.
pub fn rollout<M: DynamicsModel + ?Sized>(
    model: &M,
    ctx: &mut ModelCtx,
    start_state: &[f64],
    actions: &[f64],
    propagation: Propagation,
    seed: u64,
) -> Result<BeliefRollout> {
    let starts = vec![start_state.to_vec(); model.num_members()];
    rollout_from(model, ctx, &starts, actions, propagation, seed, 0)
}

/// Roll forward from per-member start particles. `start_step` offsets the
/// per-step sampling streams so a rollout can be split and resumed: rolling
/// steps [0,H) and then [H,2H) from the first half's particles consumes
/// exactly the streams of the single [0,2H) rollout.
pub fn rollout_from<M: DynamicsModel + ?Sized>(
    model: &M,
    ctx: &mut ModelCtx,
    starts: &[Vec<f64>],
    actions: &[f64],
    propagation: Propagation,
    seed: u64,
    start_step: u64,
) -> Result<BeliefRollout> {
    let b = model.num_members();
    if b == 0 {
        return Err(FeefError::EnsembleTooSmall(0));
    }
    let d_a = model.action_dim();
    let d_s = model.state_dim();
    if starts.len() != b || starts.iter().any(|s| s.len() != d_s) {
        return Err(FeefError::DimensionMismatch(format!(
            "rollout: expected {b} start particles of dimension {d_s}"
        )));
    }
    if d_a == 0 || actions.len() % d_a != 0 {
        return Err(FeefError::DimensionMismatch(format!(
            "rollout: {} action values do not tile dimension {}",
            actions.len(),
            d_a
        )));
    }
    if !starts.iter().all(|s| s.iter().all(|v| v.is_finite())) {
        return Err(FeefError::DimensionMismatch(
            "rollout: non-finite start state".into(),
        ));
    }
    let horizon = actions.len() / d_a;
    let mut current: Vec<Vec<f64>> = starts.to_vec();
    let mut steps = Vec::with_capacity(horizon);
    let mut truncated = false;
    'horizon: for tau in 0..horizon {
        let action = &actions[tau * d_a..(tau + 1) * d_a];
        let mut next_gaussians = Vec::with_capacity(b);
        let mut particles = Vec::with_capacity(b);
        let mut reward_gaussians = Vec::with_capacity(b);
        for member in 0..b {
            let g = model.transition(ctx, member, &current[member], action)?;
            if !g.is_finite() {
                truncated = true;
                break 'horizon;
            }
            let next = match propagation {
                Propagation::Mean => g.mean().to_vec(),
                Propagation::Sample => {
                    let mut rng = rng_from_seed(derive_seed_path(
                        seed,
                        &[TAG_PARTICLE, start_step + tau as u64, member as u64],
                    ));
                    g.sample(&mut rng)
                }
            };
            if !next.iter().all(|v| v.is_finite()) {
                truncated = true;
                break 'horizon;
            }
            let r = model.reward(ctx, &next)?;
            if !r.is_finite() {
                truncated = true;
                break 'horizon;
            }
            next_gaussians.push(g);
            particles.push(next);
            reward_gaussians.push(r);
        }
        current.clone_from_slice(&particles);
        steps.push(RolloutStep {
            next_gaussians,
            particles,
            reward_gaussians,
        });
    }
    Ok(BeliefRollout {
        starts: starts.to_vec(),
        steps,
        truncated,
    })
}
