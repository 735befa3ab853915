//! Native continuous-control environments covering three reward regimes:
//! sparse (`mountain_car`), dense well-shaped (`pendulum`), and reward-free
//! (`point_maze`), plus the grid coverage metric used to measure
//! exploration.
//!
//! Environments are pure state machines: `reset` and `step` take and return
//! plain state vectors, so one instance can serve any number of threads and
//! episode bookkeeping stays in the harness.

mod coverage;
mod mountain_car;
mod pendulum;
mod point_maze;

pub use coverage::CoverageGrid;
pub use mountain_car::MountainCar;
pub use pendulum::Pendulum;
pub use point_maze::PointMaze;

use crate::error::{FeefError, Result};

/// Bins per dimension of the 2-D coverage grid.
pub const COVERAGE_BINS: usize = 20;

#[derive(Debug, Clone)]
pub struct EnvSpec {
    pub name: &'static str,
    pub state_dim: usize,
    pub action_dim: usize,
    pub action_bounds: Vec<(f64, f64)>,
    pub max_steps: usize,
    /// True per-step maximum reward; centers the preferred prior.
    pub r_max: f64,
    /// State dimensions spanned by the coverage grid.
    pub coverage_dims: [usize; 2],
    pub coverage_bounds: [(f64, f64); 2],
}

pub trait Env: Sync {
    fn spec(&self) -> &EnvSpec;
    /// Deterministic initial state for the seed; jitter ranges are
    /// documented per environment.
    fn reset(&self, seed: u64) -> Vec<f64>;
    /// One transition. Actions are clamped to bounds, states clipped to
    /// their documented ranges; `done` marks terminal success, not the
    /// step limit (the harness enforces `max_steps`).
    fn step(&self, state: &[f64], action: &[f64]) -> (Vec<f64>, f64, bool);
}

/// Environment registry keyed by the names used in configs and the CLI.
pub fn make_env(name: &str) -> Result<Box<dyn Env>> {
    match name {
        "mountain_car" => Ok(Box::new(MountainCar::new())),
        "pendulum" => Ok(Box::new(Pendulum::new())),
        "point_maze" => Ok(Box::new(PointMaze::new())),
        other => Err(FeefError::UnknownEnv(other.to_string())),
    }
}

pub(crate) fn clamp_action(action: &[f64], bounds: &[(f64, f64)], out: &mut [f64]) {
    for (i, a) in action.iter().enumerate() {
        let (lo, hi) = bounds[i];
        out[i] = a.clamp(lo, hi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_documented_names() {
        for name in ["mountain_car", "pendulum", "point_maze"] {
            let env = make_env(name).unwrap();
            let spec = env.spec();
            assert_eq!(spec.name, name);
            assert_eq!(spec.action_bounds.len(), spec.action_dim);
            assert_eq!(env.reset(0).len(), spec.state_dim);
            assert!(spec.coverage_dims.iter().all(|&d| d < spec.state_dim));
        }
        assert!(matches!(
            make_env("half_cheetah"),
            Err(FeefError::UnknownEnv(_))
        ));
    }

    #[test]
    fn reset_and_step_are_deterministic() {
        for name in ["mountain_car", "pendulum", "point_maze"] {
            let env = make_env(name).unwrap();
            let s0 = env.reset(42);
            assert_eq!(s0, env.reset(42));
            let action = vec![0.37; env.spec().action_dim];
            let (s1, r1, d1) = env.step(&s0, &action);
            let (s2, r2, d2) = env.step(&s0, &action);
            assert_eq!(s1, s2);
            assert_eq!(r1, r2);
            assert_eq!(d1, d2);
        }
    }

    #[test]
    fn distinct_seeds_spread_initial_states() {
        let env = make_env("mountain_car").unwrap();
        let a = env.reset(1);
        let b = env.reset(2);
        assert_ne!(a[0], b[0]);
    }
}
