//! Experiment orchestration: configuration, agents, the episode and
//! experiment loops, and metrics emission.

mod agent;
mod config;
mod experiment;

pub use agent::{baseline_score, make_scorer};
pub use config::{AgentKind, ExperimentConfig};
pub use experiment::{metrics_path, run_episode, run_experiment, EpisodeRecord, CSV_HEADER};
