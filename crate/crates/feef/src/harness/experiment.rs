//! The experiment loop: a random seed episode fills the buffer, then each
//! planned episode retrains the world model from scratch on everything
//! collected so far, plans at every step, and appends its transitions.
//! Every random draw descends from the experiment seed through tagged
//! derivations, so a run is a pure function of its config.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::Rng as _;

use crate::envs::{make_env, CoverageGrid, Env};
use crate::error::{FeefError, Result};
use crate::harness::agent::make_scorer;
use crate::harness::config::{AgentKind, ExperimentConfig};
use crate::model::{train_world_model, DynamicsModel, ModelCtx, ReplayBuffer, Transition};
use crate::objective::{evaluate_candidate, PreferredPrior};
use crate::planner::{act, plan};
use crate::rng::{derive_seed, derive_seed_path, rng_from_seed};

const TAG_RESET: u64 = 0x727374;
const TAG_PLAN: u64 = 0x706c6e;
const TAG_ACT: u64 = 0x616374;
const TAG_DIAG: u64 = 0x646961;
const TAG_EPISODE: u64 = 0x6570;
const TAG_TRAIN_EPISODE: u64 = 0x7472;

pub const CSV_HEADER: &str =
    "seed,episode,return,steps,coverage,extrinsic_mean,info_gain_mean,wall_ms";

/// One row of the metrics CSV plus the degraded-planning flag (kept out of
/// the fixed CSV schema).
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub episode: usize,
    pub ret: f64,
    pub steps: usize,
    /// Cumulative visited-state grid coverage for this seed so far.
    pub coverage: f64,
    pub extrinsic_mean: f64,
    pub info_gain_mean: f64,
    pub wall_ms: u64,
    pub degraded: bool,
}

impl EpisodeRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}\n",
            self.seed,
            self.episode,
            self.ret,
            self.steps,
            self.coverage,
            self.extrinsic_mean,
            self.info_gain_mean,
            self.wall_ms
        )
    }
}

/// Play one episode. `model` may be `None` only for the random agent;
/// `episode_seed` must already identify (experiment seed, episode index).
/// Returns the record, the episode's transitions in order, and every state
/// visited (initial state first).
pub fn run_episode(
    agent: AgentKind,
    env: &dyn Env,
    model: Option<&dyn DynamicsModel>,
    config: &ExperimentConfig,
    coverage: &mut CoverageGrid,
    experiment_seed: u64,
    episode: usize,
    episode_seed: u64,
) -> Result<(EpisodeRecord, Vec<Transition>, Vec<Vec<f64>>)> {
    if agent != AgentKind::Random && model.is_none() {
        return Err(FeefError::InvalidConfig(format!(
            "agent '{agent}' plans against a model but none was trained"
        )));
    }
    let started = Instant::now();
    let spec = env.spec();
    let prior = PreferredPrior { r_max: spec.r_max };
    let objective = config.objective_config();
    let cem = config.cem_config();
    let mut plan_rng = rng_from_seed(derive_seed(episode_seed, TAG_PLAN));
    let mut act_rng = rng_from_seed(derive_seed(episode_seed, TAG_ACT));

    let mut state = env.reset(derive_seed(episode_seed, TAG_RESET));
    coverage.record(&state);
    let mut visited = vec![state.clone()];
    let mut transitions = Vec::new();
    let mut ret = 0.0;
    let mut degraded = false;
    let mut diag_sums = (0.0, 0.0);
    let mut diag_count = 0usize;

    for step in 0..spec.max_steps {
        let action = match (agent, model) {
            (AgentKind::Random, _) => spec
                .action_bounds
                .iter()
                .map(|&(lo, hi)| act_rng.gen_range(lo..hi))
                .collect::<Vec<f64>>(),
            (_, Some(model)) => {
                let scorer = make_scorer(agent, model, &state, prior, objective);
                let (dist, diag) = plan(scorer, &spec.action_bounds, &cem, &mut plan_rng)?;
                degraded |= diag.degraded;
                let diag_seed = derive_seed_path(episode_seed, &[TAG_DIAG, step as u64]);
                let mut ctx = ModelCtx::default();
                if let Ok(score) = evaluate_candidate(
                    model, &mut ctx, &state, &dist.mean, &prior, &objective, diag_seed,
                ) {
                    if score.extrinsic_kl.is_finite() && score.info_gain.is_finite() {
                        diag_sums.0 += score.extrinsic_kl;
                        diag_sums.1 += score.info_gain;
                        diag_count += 1;
                    }
                }
                act(&dist)
            }
            _ => unreachable!("checked above"),
        };
        let (next, reward, done) = env.step(&state, &action);
        ret += reward;
        coverage.record(&next);
        visited.push(next.clone());
        transitions.push(Transition {
            state: std::mem::replace(&mut state, next),
            action,
            next_state: visited.last().unwrap().clone(),
            reward,
        });
        if done {
            break;
        }
    }

    let denom = diag_count.max(1) as f64;
    let record = EpisodeRecord {
        seed: experiment_seed,
        episode,
        ret,
        steps: transitions.len(),
        coverage: coverage.fraction(),
        extrinsic_mean: diag_sums.0 / denom,
        info_gain_mean: diag_sums.1 / denom,
        wall_ms: if config.record_wall_time {
            started.elapsed().as_millis() as u64
        } else {
            0
        },
        degraded,
    };
    Ok((record, transitions, visited))
}

/// Run the full experiment: for every seed, collect the random seed
/// episode, then alternate cold-start training and planned episodes.
/// Writes `manifest.txt` and `metrics.csv` under the config's output
/// directory (plus per-seed `coverage_<seed>.csv` when exporting), and
/// returns the records in emission order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<EpisodeRecord>> {
    config.validate()?;
    let env = make_env(&config.env)?;
    fs::create_dir_all(&config.out_dir)?;
    // manifest write doubles as the output-path probe before any compute
    fs::write(config.out_dir.join("manifest.txt"), config.manifest())?;

    let mut records = Vec::new();
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for &seed in &config.seeds {
        let mut buffer = ReplayBuffer::new();
        let mut coverage = CoverageGrid::for_env(env.spec());
        let mut coverage_rows = String::from("episode,step,s0,s1\n");

        let seed_ep = derive_seed_path(seed, &[TAG_EPISODE, 0]);
        let (_, transitions, visited) = run_episode(
            AgentKind::Random,
            env.as_ref(),
            None,
            config,
            &mut coverage,
            seed,
            0,
            seed_ep,
        )?;
        buffer.extend(transitions);
        append_coverage_rows(&mut coverage_rows, 0, &visited, env.spec().coverage_dims);

        for episode in 1..=config.episodes {
            let model = if config.agent == AgentKind::Random {
                None
            } else {
                let mut train_rng =
                    rng_from_seed(derive_seed_path(seed, &[TAG_TRAIN_EPISODE, episode as u64]));
                Some(train_world_model(&buffer, &config.train_config(), &mut train_rng)?.0)
            };
            let episode_seed = derive_seed_path(seed, &[TAG_EPISODE, episode as u64]);
            let (record, transitions, visited) = run_episode(
                config.agent,
                env.as_ref(),
                model.as_ref().map(|m| m as &dyn DynamicsModel),
                config,
                &mut coverage,
                seed,
                episode,
                episode_seed,
            )?;
            buffer.extend(transitions);
            append_coverage_rows(&mut coverage_rows, episode, &visited, env.spec().coverage_dims);
            csv.push_str(&record.csv_row());
            records.push(record);
        }

        if config.export_coverage {
            fs::write(
                config.out_dir.join(format!("coverage_{seed}.csv")),
                &coverage_rows,
            )?;
        }
    }
    fs::write(config.out_dir.join("metrics.csv"), csv)?;
    Ok(records)
}

fn append_coverage_rows(out: &mut String, episode: usize, visited: &[Vec<f64>], dims: [usize; 2]) {
    for (step, state) in visited.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            episode, step, state[dims[0]], state[dims[1]]
        ));
    }
}

/// Metrics CSV path for a finished run.
pub fn metrics_path(out_dir: &Path) -> std::path::PathBuf {
    out_dir.join("metrics.csv")
}
