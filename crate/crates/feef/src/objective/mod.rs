//! The planning objective: imagined ensemble rollouts, per-step extrinsic
//! and information-gain terms, candidate scoring, and an exact tabular
//! oracle for the objective's decomposition and bound identities.

#[cfg(test)]
pub(crate) mod fixtures;
pub mod rollout;
pub mod score;
pub mod tabular;

pub use rollout::{rollout, rollout_from, BeliefRollout, Propagation, RolloutStep};
pub use score::{
    evaluate_candidate, evaluate_from, extrinsic_step, info_gain_step, score_rollout, FeefScore,
    ObjectiveConfig, PreferredPrior,
};
pub use tabular::{
    bound_check_cases, perturbed_posterior, random_toy, tabular_feef, tabular_feef_with_posterior,
    BoundCase, TabularFeef, TabularToyModel, BOUND_TOL,
};
