//! Per-agent candidate scoring. All planned agents share the rollout
//! machinery and differ only in which terms of the objective they keep.

use crate::harness::config::AgentKind;
use crate::model::{DynamicsModel, ModelCtx};
use crate::objective::{
    extrinsic_step, rollout, score_rollout, BeliefRollout, ObjectiveConfig, PreferredPrior,
};

/// Score a completed rollout under the agent's objective (higher is
/// better). Truncated rollouts are invalid candidates for every agent.
pub fn baseline_score(
    kind: AgentKind,
    ro: &BeliefRollout,
    prior: &PreferredPrior,
    config: &ObjectiveConfig,
    seed: u64,
    start_step: u64,
) -> f64 {
    if ro.truncated {
        return f64::NEG_INFINITY;
    }
    match kind {
        AgentKind::Feef => score_rollout(ro, prior, config, seed, start_step)
            .map_or(f64::NEG_INFINITY, |s| s.total),
        AgentKind::RewardOnly => -extrinsic(ro, prior),
        AgentKind::Variance => -extrinsic(ro, prior) + summed_predictive_variance(ro),
        // the random agent never plans; a constant makes that harmless
        AgentKind::Random => 0.0,
    }
}

fn extrinsic(ro: &BeliefRollout, prior: &PreferredPrior) -> f64 {
    ro.steps
        .iter()
        .map(|s| extrinsic_step(&s.reward_gaussians, prior))
        .sum()
}

/// Exploration bonus of the variance agent: raw sum of the predicted
/// next-state variances over steps, members and dimensions.
fn summed_predictive_variance(ro: &BeliefRollout) -> f64 {
    ro.steps
        .iter()
        .flat_map(|s| &s.next_gaussians)
        .map(|g| g.variance().iter().sum::<f64>())
        .sum()
}

/// Build the planner's score function for one decision point: simulate the
/// candidate from `state` and score it under the agent's objective. Pure in
/// (candidate, seed), so the planner may run it from any thread.
pub fn make_scorer<'a>(
    kind: AgentKind,
    model: &'a dyn DynamicsModel,
    state: &[f64],
    prior: PreferredPrior,
    config: ObjectiveConfig,
) -> impl Fn(&[f64], u64) -> f64 + Sync + 'a {
    let state = state.to_vec();
    move |actions: &[f64], seed: u64| {
        let mut ctx = ModelCtx::default();
        match rollout(model, &mut ctx, &state, actions, config.propagation, seed) {
            Ok(ro) => baseline_score(kind, &ro, &prior, &config, seed, 0),
            Err(_) => f64::NEG_INFINITY,
        }
    }
}
