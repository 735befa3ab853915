//! Experiment configuration: flat key=value files, CLI-style overrides,
//! and the resolved-config manifest. Every key has exactly one spelling,
//! shared by files, flags, and the manifest, so a manifest re-parses to the
//! run that produced it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{FeefError, Result};
use crate::model::TrainConfig;
use crate::objective::{ObjectiveConfig, Propagation};
use crate::planner::CemConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AgentKind {
    Feef,
    RewardOnly,
    Variance,
    Random,
}

impl FromStr for AgentKind {
    type Err = FeefError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feef" => Ok(Self::Feef),
            "reward_only" => Ok(Self::RewardOnly),
            "variance" => Ok(Self::Variance),
            "random" => Ok(Self::Random),
            other => Err(FeefError::InvalidConfig(format!(
                "unknown agent '{other}' (expected feef, reward_only, variance or random)"
            ))),
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Feef => "feef",
            Self::RewardOnly => "reward_only",
            Self::Variance => "variance",
            Self::Random => "random",
        })
    }
}

fn parse_propagation(s: &str) -> Result<Propagation> {
    match s {
        "sample" => Ok(Propagation::Sample),
        "mean" => Ok(Propagation::Mean),
        other => Err(FeefError::InvalidConfig(format!(
            "unknown propagation '{other}' (expected sample or mean)"
        ))),
    }
}

fn propagation_name(p: Propagation) -> &'static str {
    match p {
        Propagation::Sample => "sample",
        Propagation::Mean => "mean",
    }
}

/// Full resolved experiment description. Defaults are the desk-scale
/// configuration (small nets and planner budgets that keep a full
/// mountain-car seed in the minutes range on one core); `paper_scale`
/// switches the four affected knobs to the full-scale values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: String,
    pub agent: AgentKind,
    /// Planned episodes per seed, not counting the random seed episode.
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub ensemble_size: usize,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub minibatch: usize,
    pub candidates: usize,
    pub elites: usize,
    pub iterations: usize,
    pub horizon: usize,
    pub samples_per_member: usize,
    pub propagation: Propagation,
    pub out_dir: PathBuf,
    /// Real wall-clock times make the CSV non-reproducible byte for byte,
    /// so the column is written as 0 unless this is set.
    pub record_wall_time: bool,
    pub export_coverage: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: "mountain_car".into(),
            agent: AgentKind::Feef,
            episodes: 10,
            seeds: vec![0, 1, 2, 3, 4],
            ensemble_size: 5,
            hidden_width: 64,
            hidden_layers: 2,
            epochs: 100,
            learning_rate: 1e-3,
            minibatch: 64,
            candidates: 200,
            elites: 20,
            iterations: 4,
            horizon: 30,
            samples_per_member: 10,
            propagation: Propagation::Sample,
            out_dir: PathBuf::from("runs"),
            record_wall_time: false,
            export_coverage: false,
        }
    }
}

impl ExperimentConfig {
    /// Full-scale model and planner budgets.
    pub fn paper_scale(&mut self) {
        self.hidden_width = 400;
        self.candidates = 700;
        self.elites = 70;
        self.iterations = 7;
    }

    pub fn validate(&self) -> Result<()> {
        crate::envs::make_env(&self.env)?;
        if self.seeds.is_empty() {
            return Err(FeefError::InvalidConfig("seeds list is empty".into()));
        }
        if self.ensemble_size < 2 {
            return Err(FeefError::InvalidConfig(
                "ensemble_size must be at least 2 (information gain needs a mixture)".into(),
            ));
        }
        if self.samples_per_member == 0 {
            return Err(FeefError::InvalidConfig(
                "samples_per_member must be positive".into(),
            ));
        }
        self.train_config().validate()?;
        self.cem_config().validate()?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            ensemble_size: self.ensemble_size,
            hidden_width: self.hidden_width,
            hidden_layers: self.hidden_layers,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            minibatch: self.minibatch,
        }
    }

    pub fn cem_config(&self) -> CemConfig {
        CemConfig {
            candidates: self.candidates,
            elites: self.elites,
            iterations: self.iterations,
            horizon: self.horizon,
        }
    }

    pub fn objective_config(&self) -> ObjectiveConfig {
        ObjectiveConfig {
            samples_per_member: self.samples_per_member,
            propagation: self.propagation,
        }
    }

    /// Parse a flat key=value config text over the defaults. `#` starts a
    /// comment; blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                FeefError::InvalidConfig(format!("line {}: expected key=value", lineno + 1))
            })?;
            config.apply(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Set one field from its textual form; used by both file parsing and
    /// CLI flag overrides.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                FeefError::InvalidConfig(format!("invalid value '{value}' for {key}"))
            })
        }
        match key {
            "env" => self.env = value.to_string(),
            "agent" => self.agent = value.parse()?,
            "episodes" => self.episodes = num(key, value)?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?;
            }
            "ensemble_size" => self.ensemble_size = num(key, value)?,
            "hidden_width" => self.hidden_width = num(key, value)?,
            "hidden_layers" => self.hidden_layers = num(key, value)?,
            "epochs" => self.epochs = num(key, value)?,
            "learning_rate" => self.learning_rate = num(key, value)?,
            "minibatch" => self.minibatch = num(key, value)?,
            "candidates" => self.candidates = num(key, value)?,
            "elites" => self.elites = num(key, value)?,
            "iterations" => self.iterations = num(key, value)?,
            "horizon" => self.horizon = num(key, value)?,
            "samples_per_member" => self.samples_per_member = num(key, value)?,
            "propagation" => self.propagation = parse_propagation(value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "record_wall_time" => self.record_wall_time = num(key, value)?,
            "export_coverage" => self.export_coverage = num(key, value)?,
            other => {
                return Err(FeefError::InvalidConfig(format!(
                    "unknown config key '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// The resolved configuration as sorted key=value lines. Written next
    /// to the metrics so every run is self-describing; parses back to an
    /// identical config.
    pub fn manifest(&self) -> String {
        let seeds = self
            .seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        let mut lines = vec![
            format!("agent={}", self.agent),
            format!("candidates={}", self.candidates),
            format!("elites={}", self.elites),
            format!("ensemble_size={}", self.ensemble_size),
            format!("env={}", self.env),
            format!("episodes={}", self.episodes),
            format!("epochs={}", self.epochs),
            format!("export_coverage={}", self.export_coverage),
            format!("hidden_layers={}", self.hidden_layers),
            format!("hidden_width={}", self.hidden_width),
            format!("horizon={}", self.horizon),
            format!("iterations={}", self.iterations),
            format!("learning_rate={}", self.learning_rate),
            format!("minibatch={}", self.minibatch),
            format!("out_dir={}", self.out_dir.display()),
            format!("propagation={}", propagation_name(self.propagation)),
            format!("record_wall_time={}", self.record_wall_time),
            format!("samples_per_member={}", self.samples_per_member),
            format!("seeds={seeds}"),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn manifest_round_trips() {
        let mut config = ExperimentConfig::default();
        config.env = "point_maze".into();
        config.agent = AgentKind::Variance;
        config.seeds = vec![7, 9];
        config.learning_rate = 3e-4;
        config.propagation = Propagation::Mean;
        config.out_dir = PathBuf::from("/tmp/somewhere");
        config.export_coverage = true;
        config.paper_scale();
        let reparsed = ExperimentConfig::from_text(&config.manifest()).unwrap();
        assert_eq!(reparsed, config);
    }

    #[test]
    fn file_text_supports_comments_and_blanks() {
        let text = "\n# a comment\nenv = pendulum\nepisodes=3 # trailing comment\n\nseeds = 1, 2\n";
        let config = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(config.env, "pendulum");
        assert_eq!(config.episodes, 3);
        assert_eq!(config.seeds, vec![1, 2]);
        // untouched keys keep their defaults
        assert_eq!(config.candidates, 200);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(ExperimentConfig::from_text("exploration_bonus=1").is_err());
        assert!(ExperimentConfig::from_text("episodes=three").is_err());
        assert!(ExperimentConfig::from_text("agent=sac").is_err());
        assert!(ExperimentConfig::from_text("episodes").is_err());
        assert!(ExperimentConfig::from_text("propagation=both").is_err());
    }

    #[test]
    fn overrides_win_over_file_values() {
        let mut config = ExperimentConfig::from_text("episodes=3\nenv=pendulum\n").unwrap();
        config.apply("episodes", "12").unwrap();
        assert_eq!(config.episodes, 12);
        assert_eq!(config.env, "pendulum");
    }

    #[test]
    fn paper_scale_touches_exactly_the_four_knobs() {
        let mut config = ExperimentConfig::default();
        config.paper_scale();
        assert_eq!(
            (config.hidden_width, config.candidates, config.elites, config.iterations),
            (400, 700, 70, 7)
        );
        assert_eq!(config.horizon, 30);
        assert_eq!(config.ensemble_size, 5);
    }

    #[test]
    fn validation_rejects_degenerate_setups() {
        let mut config = ExperimentConfig::default();
        config.ensemble_size = 1;
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.seeds.clear();
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.env = "ant_maze".into();
        assert!(config.validate().is_err());

        let mut config = ExperimentConfig::default();
        config.elites = config.candidates + 1;
        assert!(config.validate().is_err());
    }
}
