//! Command-line entry point: `run` executes experiments from a config file
//! plus flag overrides, `bound-check` exercises the exact tabular oracle
//! suite, and `export-coverage` additionally dumps visited-state points.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use feef::harness::{metrics_path, run_experiment, ExperimentConfig};
use feef::objective::bound_check_cases;

#[derive(Parser)]
#[command(name = "feef", version, about = "Ensemble world models planned by expected-future free energy", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write manifest + metrics CSV.
    Run(RunArgs),
    /// Verify the exact-enumeration bound and decomposition on random
    /// tabular worlds; prints one line per case.
    BoundCheck {
        /// Number of random toy worlds.
        #[arg(long, default_value_t = 20)]
        toys: usize,
        /// Seed for generating the worlds.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment and also write per-seed visited-state CSVs
    /// (columns: episode,step,s0,s1).
    ExportCoverage(RunArgs),
}

/// Every experiment-config key is also a flag with the same spelling;
/// flags override the config file.
#[derive(Args)]
struct RunArgs {
    /// Flat key=value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Switch to the full-scale hyperparameters (hidden 400, CEM 700/70/7)
    /// before applying flag overrides.
    #[arg(long = "paper-config", default_value_t = false)]
    paper_config: bool,
    #[arg(long = "env")]
    env: Option<String>,
    #[arg(long = "agent")]
    agent: Option<String>,
    #[arg(long = "episodes")]
    episodes: Option<String>,
    #[arg(long = "seeds")]
    seeds: Option<String>,
    #[arg(long = "ensemble_size")]
    ensemble_size: Option<String>,
    #[arg(long = "hidden_width")]
    hidden_width: Option<String>,
    #[arg(long = "hidden_layers")]
    hidden_layers: Option<String>,
    #[arg(long = "epochs")]
    epochs: Option<String>,
    #[arg(long = "learning_rate")]
    learning_rate: Option<String>,
    #[arg(long = "minibatch")]
    minibatch: Option<String>,
    #[arg(long = "candidates")]
    candidates: Option<String>,
    #[arg(long = "elites")]
    elites: Option<String>,
    #[arg(long = "iterations")]
    iterations: Option<String>,
    #[arg(long = "horizon")]
    horizon: Option<String>,
    #[arg(long = "samples_per_member")]
    samples_per_member: Option<String>,
    #[arg(long = "propagation")]
    propagation: Option<String>,
    #[arg(long = "out_dir")]
    out_dir: Option<PathBuf>,
    #[arg(long = "record_wall_time")]
    record_wall_time: Option<String>,
    #[arg(long = "export_coverage")]
    export_coverage: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_text(&fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        if self.paper_config {
            config.paper_scale();
        }
        let overrides = [
            ("env", &self.env),
            ("agent", &self.agent),
            ("episodes", &self.episodes),
            ("seeds", &self.seeds),
            ("ensemble_size", &self.ensemble_size),
            ("hidden_width", &self.hidden_width),
            ("hidden_layers", &self.hidden_layers),
            ("epochs", &self.epochs),
            ("learning_rate", &self.learning_rate),
            ("minibatch", &self.minibatch),
            ("candidates", &self.candidates),
            ("elites", &self.elites),
            ("iterations", &self.iterations),
            ("horizon", &self.horizon),
            ("samples_per_member", &self.samples_per_member),
            ("propagation", &self.propagation),
            ("record_wall_time", &self.record_wall_time),
            ("export_coverage", &self.export_coverage),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                config.apply(key, value)?;
            }
        }
        if let Some(dir) = &self.out_dir {
            config.out_dir = dir.clone();
        }
        Ok(config)
    }
}

fn run(args: &RunArgs, force_coverage: bool) -> anyhow::Result<()> {
    let mut config = args.resolve()?;
    if force_coverage {
        config.export_coverage = true;
    }
    let records = run_experiment(&config)?;
    println!(
        "wrote {} episode records to {}",
        records.len(),
        metrics_path(&config.out_dir).display()
    );
    Ok(())
}

fn bound_check(toys: usize, seed: u64) -> anyhow::Result<bool> {
    let cases = bound_check_cases(toys, seed)?;
    let mut all_ok = true;
    for case in &cases {
        let ok = case.holds();
        all_ok &= ok;
        println!(
            "toy {:02} policy {}: bound slack {:+.6e}, decomposition residual {:.3e} ... {}",
            case.toy,
            case.policy,
            case.slack,
            case.residual,
            if ok { "ok" } else { "FAIL" }
        );
    }
    println!("{}", if all_ok { "all cases hold" } else { "VIOLATIONS FOUND" });
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Run(args) => run(args, false).map(|()| true),
        Command::ExportCoverage(args) => run(args, true).map(|()| true),
        Command::BoundCheck { toys, seed } => bound_check(*toys, *seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
