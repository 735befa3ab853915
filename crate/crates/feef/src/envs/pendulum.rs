//! Pendulum swing-up: the dense, well-shaped regime. The state exposes
//! (cos θ, sin θ, ω) so the learned model never sees an angle-wrap
//! discontinuity; θ = 0 is upright and the cost is computed at the
//! pre-transition state, so r_max = 0 is attained exactly at the upright
//! fixed point with zero torque.

use rand::Rng as _;

use super::{clamp_action, Env, EnvSpec};
use crate::rng::rng_from_seed;

const GRAVITY_OVER_LENGTH: f64 = 10.0;
const TORQUE_GAIN: f64 = 15.0;
const DT: f64 = 0.05;
const OMEGA_RANGE: (f64, f64) = (-8.0, 8.0);
const RESET_JITTER: f64 = 0.1;

pub struct Pendulum {
    spec: EnvSpec,
}

impl Pendulum {
    pub fn new() -> Self {
        Self {
            spec: EnvSpec {
                name: "pendulum",
                state_dim: 3,
                action_dim: 1,
                action_bounds: vec![(-1.0, 1.0)],
                max_steps: 100,
                r_max: 0.0,
                coverage_dims: [1, 2],
                coverage_bounds: [(-1.0, 1.0), OMEGA_RANGE],
            },
        }
    }
}

impl Default for Pendulum {
    fn default() -> Self {
        Self::new()
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = (theta + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    }
    t
}

impl Env for Pendulum {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        let theta = std::f64::consts::PI + rng.gen_range(-RESET_JITTER..RESET_JITTER);
        vec![theta.cos(), theta.sin(), 0.0]
    }

    fn step(&self, state: &[f64], action: &[f64]) -> (Vec<f64>, f64, bool) {
        let mut a = [0.0];
        clamp_action(action, &self.spec.action_bounds, &mut a);
        let theta = state[1].atan2(state[0]);
        let omega = state[2];
        let err = wrap_angle(theta);
        let reward = -(err * err + 0.1 * omega * omega + 0.001 * a[0] * a[0]);
        let omega = (omega + DT * (GRAVITY_OVER_LENGTH * theta.sin() + TORQUE_GAIN * a[0]))
            .clamp(OMEGA_RANGE.0, OMEGA_RANGE.1);
        let theta = theta + DT * omega;
        (vec![theta.cos(), theta.sin(), omega], reward, false)
    }
}
