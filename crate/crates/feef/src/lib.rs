//! Model-based exploration agents driven by an expected-free-energy
//! objective over an ensemble of learned dynamics models.
//!
//! The crate is layered bottom-up:
//!
//! - [`math`]: Gaussians, dense nets with analytic gradients, Adam, and a
//!   nonparametric entropy estimator.
//! - [`model`]: replay buffer, input normalization, and the bootstrapped
//!   transition/reward ensemble with its training loop.
//! - [`objective`]: imagined rollouts and the per-step score combining
//!   expected information gain with divergence from a preferred outcome.
//! - [`planner`]: cross-entropy-method search over open-loop action
//!   sequences.
//! - [`envs`]: small benchmark environments with pure step functions.
//! - [`harness`]: experiment configs, episode loops, and CSV logging.

pub mod envs;
pub mod error;
pub mod harness;
pub mod math;
pub mod model;
pub mod objective;
pub mod planner;
pub mod rng;

pub use error::{FeefError, Result};
