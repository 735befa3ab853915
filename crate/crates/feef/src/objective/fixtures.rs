//! Hand-specified models with closed-form behavior, for exercising the
//! rollout and scoring paths without any training.

use crate::error::Result;
use crate::math::gaussian::DiagonalGaussian;
use crate::model::ensemble::{DynamicsModel, ModelCtx};

/// Member b predicts N(state + shift_b, variance·I); the reward at a state
/// is N(reward_scale · Σᵢ stateᵢ, 1). Actions are ignored (d_a = 1).
pub(crate) struct ConstShiftModel {
    shifts: Vec<Vec<f64>>,
    variance: f64,
    reward_scale: f64,
}

impl ConstShiftModel {
    pub fn new(shifts: Vec<Vec<f64>>, variance: f64, reward_scale: f64) -> Self {
        assert!(!shifts.is_empty());
        Self {
            shifts,
            variance,
            reward_scale,
        }
    }
}

impl DynamicsModel for ConstShiftModel {
    fn num_members(&self) -> usize {
        self.shifts.len()
    }

    fn state_dim(&self) -> usize {
        self.shifts[0].len()
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn transition(
        &self,
        _ctx: &mut ModelCtx,
        member: usize,
        state: &[f64],
        _action: &[f64],
    ) -> Result<DiagonalGaussian> {
        let shift = &self.shifts[member];
        let mean = state.iter().zip(shift).map(|(s, d)| s + d).collect();
        Ok(DiagonalGaussian::new(mean, vec![self.variance; state.len()]))
    }

    fn reward(&self, _ctx: &mut ModelCtx, state: &[f64]) -> Result<DiagonalGaussian> {
        let sum: f64 = state.iter().sum();
        Ok(DiagonalGaussian::new(vec![self.reward_scale * sum], vec![1.0]))
    }
}

/// Every member predicts N((state + 1)·factor, 1); with a large factor the
/// imagined trajectory overflows to infinity within a few steps.
pub(crate) struct ExplodingModel {
    members: usize,
    factor: f64,
}

impl ExplodingModel {
    pub fn new(members: usize) -> Self {
        Self {
            members,
            factor: 1e100,
        }
    }
}

impl DynamicsModel for ExplodingModel {
    fn num_members(&self) -> usize {
        self.members
    }

    fn state_dim(&self) -> usize {
        1
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn transition(
        &self,
        _ctx: &mut ModelCtx,
        _member: usize,
        state: &[f64],
        _action: &[f64],
    ) -> Result<DiagonalGaussian> {
        Ok(DiagonalGaussian::new(
            vec![(state[0] + 1.0) * self.factor],
            vec![1.0],
        ))
    }

    fn reward(&self, _ctx: &mut ModelCtx, _state: &[f64]) -> Result<DiagonalGaussian> {
        Ok(DiagonalGaussian::new(vec![0.0], vec![1.0]))
    }
}
