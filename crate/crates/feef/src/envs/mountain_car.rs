//! Continuous mountain car: the sparse-reward regime. The engine is too
//! weak to drive straight up, so reaching the goal requires pumping
//! momentum off the opposing slope; reward is 1 exactly at the goal and 0
//! everywhere else.

use rand::Rng as _;

use super::{clamp_action, Env, EnvSpec};
use crate::rng::rng_from_seed;

const POSITION_RANGE: (f64, f64) = (-1.2, 0.6);
const VELOCITY_RANGE: (f64, f64) = (-0.07, 0.07);
const START_RANGE: (f64, f64) = (-0.6, -0.4);
const GOAL_POSITION: f64 = 0.45;
const THROTTLE: f64 = 0.0015;
const GRAVITY: f64 = 0.0025;

pub struct MountainCar {
    spec: EnvSpec,
}

impl MountainCar {
    pub fn new() -> Self {
        Self {
            spec: EnvSpec {
                name: "mountain_car",
                state_dim: 2,
                action_dim: 1,
                action_bounds: vec![(-1.0, 1.0)],
                max_steps: 200,
                r_max: 1.0,
                coverage_dims: [0, 1],
                coverage_bounds: [POSITION_RANGE, VELOCITY_RANGE],
            },
        }
    }

    /// Mechanical energy for the zero-action system: the velocity update
    /// adds −GRAVITY·cos(3p), so the potential is (GRAVITY/3)·sin(3p).
    pub fn energy(state: &[f64]) -> f64 {
        0.5 * state[1] * state[1] + GRAVITY / 3.0 * (3.0 * state[0]).sin()
    }
}

impl Default for MountainCar {
    fn default() -> Self {
        Self::new()
    }
}

impl Env for MountainCar {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        vec![rng.gen_range(START_RANGE.0..START_RANGE.1), 0.0]
    }

    fn step(&self, state: &[f64], action: &[f64]) -> (Vec<f64>, f64, bool) {
        let mut a = [0.0];
        clamp_action(action, &self.spec.action_bounds, &mut a);
        let (p, v) = (state[0], state[1]);
        let v = (v + THROTTLE * a[0] - GRAVITY * (3.0 * p).cos())
            .clamp(VELOCITY_RANGE.0, VELOCITY_RANGE.1);
        let p = (p + v).clamp(POSITION_RANGE.0, POSITION_RANGE.1);
        let reached = p >= GOAL_POSITION;
        let reward = if reached { 1.0 } else { 0.0 };
        (vec![p, v], reward, reached)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_constant(env: &MountainCar, seed: u64, action: f64, steps: usize) -> Vec<Vec<f64>> {
        let mut states = vec![env.reset(seed)];
        for _ in 0..steps {
            let (next, _, done) = env.step(states.last().unwrap(), &[action]);
            states.push(next);
            if done {
                break;
            }
        }
        states
    }

    #[test]
    fn reset_draws_position_from_start_range_with_zero_velocity() {
        let env = MountainCar::new();
        for seed in 0..50 {
            let s = env.reset(seed);
            assert!((START_RANGE.0..START_RANGE.1).contains(&s[0]));
            assert_eq!(s[1], 0.0);
        }
    }

    #[test]
    fn crossing_the_goal_yields_reward_one_and_done() {
        let env = MountainCar::new();
        // fast state just below the goal: one step carries it across
        let (next, reward, done) = env.step(&[0.44, 0.07], &[1.0]);
        assert!(next[0] >= GOAL_POSITION);
        assert_eq!(reward, 1.0);
        assert!(done);
    }

    #[test]
    fn resting_at_the_valley_bottom_stays_put_without_throttle() {
        let env = MountainCar::new();
        // valley bottom: cos(3p) = 0
        let bottom = -std::f64::consts::FRAC_PI_6;
        let (next, reward, done) = env.step(&[bottom, 0.0], &[0.0]);
        assert_eq!(reward, 0.0);
        assert!(!done);
        assert!((next[0] - bottom).abs() < 1e-3);
    }

    #[test]
    fn rewards_are_zero_or_one_and_one_implies_done() {
        let env = MountainCar::new();
        let mut rng = rng_from_seed(7);
        let mut state = env.reset(0);
        for _ in 0..2000 {
            let a = rng.gen_range(-1.0..1.0);
            let (next, reward, done) = env.step(&state, &[a]);
            assert!(reward == 0.0 || reward == 1.0);
            if reward == 1.0 {
                assert!(done);
            }
            state = if done { env.reset(rng.gen()) } else { next };
        }
    }

    #[test]
    fn states_stay_within_documented_ranges() {
        let env = MountainCar::new();
        let mut rng = rng_from_seed(3);
        let mut state = env.reset(1);
        for _ in 0..2000 {
            let a = rng.gen_range(-2.0..2.0); // out-of-bounds actions get clamped
            let (next, _, done) = env.step(&state, &[a]);
            assert!((POSITION_RANGE.0..=POSITION_RANGE.1).contains(&next[0]));
            assert!((VELOCITY_RANGE.0..=VELOCITY_RANGE.1).contains(&next[1]));
            state = if done { env.reset(rng.gen()) } else { next };
        }
    }

    #[test]
    fn coasting_energy_is_non_increasing_up_to_integration_slack() {
        let env = MountainCar::new();
        for seed in 0..5 {
            let states = run_constant(&env, seed, 0.0, 200);
            for pair in states.windows(2) {
                let before = MountainCar::energy(&pair[0]);
                let after = MountainCar::energy(&pair[1]);
                assert!(
                    after <= before + 1e-6,
                    "energy rose {before} -> {after} (seed {seed})"
                );
            }
        }
    }

    #[test]
    fn full_throttle_alone_cannot_reach_the_goal() {
        let env = MountainCar::new();
        for seed in 0..5 {
            let states = run_constant(&env, seed, 1.0, 200);
            let peak = states.iter().map(|s| s[0]).fold(f64::MIN, f64::max);
            assert!(peak < GOAL_POSITION, "seed {seed} peaked at {peak}");
        }
    }

    #[test]
    fn pumping_off_the_left_slope_does_reach_the_goal() {
        // bang-bang throttle matched to the velocity sign builds momentum
        let env = MountainCar::new();
        let mut state = env.reset(0);
        let mut done = false;
        for _ in 0..200 {
            let a = if state[1] >= 0.0 { 1.0 } else { -1.0 };
            let (next, reward, d) = env.step(&state, &[a]);
            state = next;
            if d {
                assert_eq!(reward, 1.0);
                done = true;
                break;
            }
        }
        assert!(done, "energy pumping should solve the task within an episode");
    }
}
