//! Acceptance gate: one check per shipped guarantee, one printed line per
//! check. All checks run even after a failure so a single pass reports the
//! full picture; the test panics at the end if any line is a FAIL.
//!
//! The experiment-level checks (1-3) run the real training/planning loop at
//! the default desk scale and take hours of single-core time combined. Run
//! `cargo test -p feef --test acceptance -- --nocapture` to watch the lines
//! appear as each check completes; cheap checks run first.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use rand::Rng as _;
use rand_distr::StandardNormal;

use feef::harness::{run_experiment, AgentKind, EpisodeRecord, ExperimentConfig};
use feef::math::gaussian::DiagonalGaussian;
use feef::math::knn::knn_entropy;
use feef::math::loss::{nll_loss, nll_loss_and_grads, LossHead};
use feef::math::net::{Activation, DenseNet, NetScratch};
use feef::objective::{bound_check_cases, info_gain_step};
use feef::planner::{plan, CemConfig};
use feef::rng::rng_from_seed;

const GOAL_RETURN: f64 = 0.5; // threshold between the sparse returns 0 and 1
const COVERAGE_RATIO_SPARSE: f64 = 2.0;
const COVERAGE_RATIO_MAZE: f64 = 1.5;
const RETURN_SLACK: f64 = 0.10;
const BOUND_SLACK: f64 = -1e-9;
const DECOMPOSITION_TOL: f64 = 1e-9;
const GRADIENT_REL_TOL: f64 = 1e-4;
const ENTROPY_TOL_1D: f64 = 0.05;
const ENTROPY_TOL_2D: f64 = 0.1;
const INFO_GAIN_FLOOR: f64 = -0.1;
const INFO_GAIN_LN2_TOL: f64 = 0.1;
const CEM_TOL_PER_DIM: f64 = 0.01;

struct Gate {
    lines: Vec<(usize, String)>,
    failed: bool,
}

impl Gate {
    fn new() -> Self {
        Gate { lines: Vec::new(), failed: false }
    }

    fn record(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        let line = format!(
            "criterion {n} ({name}): {} — {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        self.lines.push((n, line));
        self.failed |= !ok;
    }

    fn finish(mut self) {
        self.lines.sort_by_key(|(n, _)| *n);
        let mut report = String::new();
        for (_, line) in &self.lines {
            writeln!(report, "{line}").unwrap();
        }
        println!("--- acceptance summary ---\n{report}");
        assert!(!self.failed, "acceptance criteria failed:\n{report}");
    }
}

fn desk_config(env: &str, agent: AgentKind, episodes: usize, seeds: &[u64], out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        env: env.into(),
        agent,
        episodes,
        seeds: seeds.to_vec(),
        out_dir: out.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

/// Final (cumulative) coverage for one seed.
fn final_coverage(records: &[EpisodeRecord], seed: u64, episodes: usize) -> f64 {
    records
        .iter()
        .find(|r| r.seed == seed && r.episode == episodes)
        .map(|r| r.coverage)
        .unwrap_or(0.0)
}

fn check_bound_and_decomposition(gate: &mut Gate) {
    let cases = bound_check_cases(20, 0).expect("bound cases");
    let min_slack = cases.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let max_residual = cases.iter().map(|c| c.residual).fold(0.0f64, f64::max);
    let status = Command::new(env!("CARGO_BIN_EXE_feef"))
        .args(["bound-check", "--toys", "20"])
        .output()
        .expect("spawn bound-check");
    gate.record(
        4,
        "objective bound on tabular toys",
        min_slack >= BOUND_SLACK && status.status.success(),
        format!(
            "min slack {min_slack:.3e} over {} cases, bound-check exit {:?}",
            cases.len(),
            status.status.code()
        ),
    );
    gate.record(
        5,
        "information-gain/extrinsic decomposition",
        max_residual < DECOMPOSITION_TOL,
        format!("max residual {max_residual:.3e} over {} cases", cases.len()),
    );
}

/// Central finite differences against the analytic gradients, over random
/// small nets, batches, and both loss heads.
fn check_gradients(gate: &mut Gate) {
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let mut rng = rng_from_seed(9_000 + trial);
        let head = if trial % 2 == 0 { LossHead::Gaussian } else { LossHead::FixedUnitVariance };
        let in_dim = rng.gen_range(1..=4);
        let hidden = rng.gen_range(3..=8);
        let out_dim = if head == LossHead::Gaussian {
            2 * rng.gen_range(1..=3)
        } else {
            rng.gen_range(1..=3)
        };
        let dims = [in_dim, hidden, out_dim];
        let mut net = DenseNet::new(&dims, Activation::Swish, &mut rng);
        let t_dim = head.target_dim(out_dim);
        let batch_len = rng.gen_range(1..=5);
        let inputs: Vec<Vec<f64>> = (0..batch_len)
            .map(|_| (0..in_dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let targets: Vec<Vec<f64>> = (0..batch_len)
            .map(|_| (0..t_dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let batch: Vec<(&[f64], &[f64])> =
            inputs.iter().zip(&targets).map(|(i, t)| (i.as_slice(), t.as_slice())).collect();

        let mut grads = vec![0.0; net.param_count()];
        let mut scratch = NetScratch::default();
        nll_loss_and_grads(&net, head, &batch, &mut scratch, &mut grads).expect("grads");

        let h = 1e-5;
        for p in 0..net.param_count() {
            let orig = net.params()[p];
            net.params_mut()[p] = orig + h;
            let up = nll_loss(&net, head, &batch).expect("loss");
            net.params_mut()[p] = orig - h;
            let down = nll_loss(&net, head, &batch).expect("loss");
            net.params_mut()[p] = orig;
            let fd = (up - down) / (2.0 * h);
            let rel = (grads[p] - fd).abs() / grads[p].abs().max(fd.abs()).max(1e-6);
            worst = worst.max(rel);
        }
    }
    gate.record(
        6,
        "analytic gradients vs central differences",
        worst < GRADIENT_REL_TOL,
        format!("max relative error {worst:.3e} over 50 nets"),
    );
}

fn check_entropy_and_info_gain(gate: &mut Gate) {
    let normal_entropy = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();

    let mut rng = rng_from_seed(4321);
    let pts_1d: Vec<f64> = (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let err_1d = (knn_entropy(&pts_1d, 1, 1).expect("1-D entropy") - normal_entropy).abs();

    let mut rng = rng_from_seed(8765);
    let pts_2d: Vec<f64> = (0..20_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let err_2d = (knn_entropy(&pts_2d, 2, 1).expect("2-D entropy") - 2.0 * normal_entropy).abs();

    let mut min_gain = f64::INFINITY;
    for trial in 0..100u64 {
        let mut rng = rng_from_seed(5_000 + trial);
        let members = rng.gen_range(2..=5);
        let dim = rng.gen_range(1..=4);
        let gaussians: Vec<DiagonalGaussian> = (0..members)
            .map(|_| {
                let mean = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let var = (0..dim).map(|_| rng.gen_range(0.05..2.0)).collect();
                DiagonalGaussian::new(mean, var)
            })
            .collect();
        let gain = info_gain_step(&gaussians, 10, &mut rng).expect("info gain");
        min_gain = min_gain.min(gain);
    }

    let mut rng = rng_from_seed(777);
    let far_apart = vec![
        DiagonalGaussian::new(vec![0.0], vec![1.0]),
        DiagonalGaussian::new(vec![50.0], vec![1.0]),
    ];
    let split_gain = info_gain_step(&far_apart, 1_000, &mut rng).expect("split gain");
    let ln2_err = (split_gain - std::f64::consts::LN_2).abs();

    gate.record(
        7,
        "entropy estimator and information gain",
        err_1d < ENTROPY_TOL_1D
            && err_2d < ENTROPY_TOL_2D
            && min_gain >= INFO_GAIN_FLOOR
            && ln2_err <= INFO_GAIN_LN2_TOL,
        format!(
            "1-D err {err_1d:.3} nats, 2-D err {err_2d:.3} nats, min gain {min_gain:.3} over 100 ensembles, two-member gain off ln 2 by {ln2_err:.3}"
        ),
    );
}

fn check_planner(gate: &mut Gate) {
    let horizon = 5;
    let bounds = vec![(-1.0, 1.0); 2];
    let n = horizon * bounds.len();
    let target: Vec<f64> = (0..n).map(|i| 0.6 * ((i as f64 * 1.3).sin())).collect();
    let quadratic = {
        let target = target.clone();
        move |a: &[f64], _seed: u64| -> f64 {
            -a.iter().zip(&target).map(|(x, c)| (x - c) * (x - c)).sum::<f64>()
        }
    };
    let config = CemConfig { candidates: 200, elites: 20, iterations: 7, horizon };
    let mut rng = rng_from_seed(11);
    let (dist, diag) = plan(&quadratic, &bounds, &config, &mut rng).expect("plan");
    let worst_dim = dist
        .mean
        .iter()
        .zip(&target)
        .map(|(m, c)| (m - c).abs())
        .fold(0.0f64, f64::max);
    let monotone = diag.best_scores.windows(2).all(|w| w[1] >= w[0]);
    gate.record(
        8,
        "planner recovers quadratic optimum",
        worst_dim <= CEM_TOL_PER_DIM && monotone && !diag.degraded,
        format!(
            "worst per-dimension error {worst_dim:.4}, best-elite monotone: {monotone}"
        ),
    );
}

fn check_determinism(gate: &mut Gate, scratch: &Path) {
    let mut config = desk_config(
        "mountain_car",
        AgentKind::Feef,
        1,
        &[0],
        &scratch.join("det_a"),
    );
    config.candidates = 50;
    config.elites = 10;
    config.iterations = 2;
    config.horizon = 10;
    config.epochs = 10;
    config.export_coverage = true;
    run_experiment(&config).expect("first run");
    let mut again = config.clone();
    again.out_dir = scratch.join("det_b");
    run_experiment(&again).expect("second run");

    let read = |dir: &Path, name: &str| std::fs::read(dir.join(name)).expect("run artifact");
    let metrics_equal =
        read(&config.out_dir, "metrics.csv") == read(&again.out_dir, "metrics.csv");
    let coverage_equal =
        read(&config.out_dir, "coverage_0.csv") == read(&again.out_dir, "coverage_0.csv");
    gate.record(
        9,
        "repeated runs are byte-identical",
        metrics_equal && coverage_equal,
        format!("metrics identical: {metrics_equal}, coverage identical: {coverage_equal}"),
    );
}

fn check_pendulum(gate: &mut Gate, scratch: &Path) {
    let seeds = [0u64, 1];
    let episodes = 20;
    let last = 5;
    let mean_last = |records: &[EpisodeRecord]| -> f64 {
        let tail: Vec<f64> = records
            .iter()
            .filter(|r| r.episode > episodes - last)
            .map(|r| r.ret)
            .collect();
        tail.iter().sum::<f64>() / tail.len() as f64
    };
    let feef_recs = run_experiment(&desk_config(
        "pendulum",
        AgentKind::Feef,
        episodes,
        &seeds,
        &scratch.join("pend_feef"),
    ))
    .expect("pendulum feef");
    let ro_recs = run_experiment(&desk_config(
        "pendulum",
        AgentKind::RewardOnly,
        episodes,
        &seeds,
        &scratch.join("pend_ro"),
    ))
    .expect("pendulum reward_only");
    let feef_mean = mean_last(&feef_recs);
    let ro_mean = mean_last(&ro_recs);
    let ok = feef_mean >= ro_mean - RETURN_SLACK * ro_mean.abs();
    gate.record(
        3,
        "exploration bonus does not hurt dense-reward control",
        ok,
        format!(
            "mean return over last {last} episodes: feef {feef_mean:.1}, reward_only {ro_mean:.1}"
        ),
    );
}

fn check_maze(gate: &mut Gate, scratch: &Path) {
    let seeds = [0u64, 1, 2, 3, 4];
    let episodes = 10;
    let feef_recs = run_experiment(&desk_config(
        "point_maze",
        AgentKind::Feef,
        episodes,
        &seeds,
        &scratch.join("maze_feef"),
    ))
    .expect("maze feef");
    let rand_recs = run_experiment(&desk_config(
        "point_maze",
        AgentKind::Random,
        episodes,
        &seeds,
        &scratch.join("maze_rand"),
    ))
    .expect("maze random");
    let mut wins = 0;
    let mut detail = String::new();
    for &seed in &seeds {
        let f = final_coverage(&feef_recs, seed, episodes);
        let r = final_coverage(&rand_recs, seed, episodes);
        if f >= COVERAGE_RATIO_MAZE * r {
            wins += 1;
        }
        write!(detail, "seed {seed}: {f:.3} vs {r:.3}; ").unwrap();
    }
    gate.record(
        2,
        "directed exploration out-covers random walk",
        wins >= 4,
        format!("{wins}/5 seeds at ≥{COVERAGE_RATIO_MAZE}× — {detail}"),
    );
}

fn check_sparse_mountain_car(gate: &mut Gate, scratch: &Path) {
    let seeds = [0u64, 1, 2, 3, 4];
    let episodes = 10;
    let feef_recs = run_experiment(&desk_config(
        "mountain_car",
        AgentKind::Feef,
        episodes,
        &seeds,
        &scratch.join("mc_feef"),
    ))
    .expect("mountain car feef");
    let ro_recs = run_experiment(&desk_config(
        "mountain_car",
        AgentKind::RewardOnly,
        episodes,
        &seeds,
        &scratch.join("mc_ro"),
    ))
    .expect("mountain car reward_only");

    let feef_early = seeds
        .iter()
        .filter(|&&s| {
            feef_recs.iter().any(|r| r.seed == s && r.episode <= 5 && r.ret > GOAL_RETURN)
        })
        .count();
    let ro_blank = seeds
        .iter()
        .filter(|&&s| ro_recs.iter().filter(|r| r.seed == s).all(|r| r.ret < GOAL_RETURN))
        .count();
    let feef_cov: f64 =
        seeds.iter().map(|&s| final_coverage(&feef_recs, s, episodes)).sum::<f64>() / 5.0;
    let ro_cov: f64 =
        seeds.iter().map(|&s| final_coverage(&ro_recs, s, episodes)).sum::<f64>() / 5.0;
    let cov_ok = feef_cov >= COVERAGE_RATIO_SPARSE * ro_cov;
    gate.record(
        1,
        "sparse-reward goal reached by exploration alone",
        feef_early >= 4 && ro_blank >= 4 && cov_ok,
        format!(
            "feef solved within 5 episodes on {feef_early}/5 seeds, reward_only blank on {ro_blank}/5, mean coverage {feef_cov:.3} vs {ro_cov:.3}"
        ),
    );
}

#[test]
fn acceptance() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let mut gate = Gate::new();

    check_bound_and_decomposition(&mut gate);
    check_gradients(&mut gate);
    check_entropy_and_info_gain(&mut gate);
    check_planner(&mut gate);
    check_determinism(&mut gate, scratch.path());
    check_pendulum(&mut gate, scratch.path());
    check_maze(&mut gate, scratch.path());
    check_sparse_mountain_car(&mut gate, scratch.path());

    gate.finish();
}
