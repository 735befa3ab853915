//! Cross-entropy-method search over open-loop action sequences.
//!
//! The policy distribution is a diagonal Gaussian over the flattened
//! `H × d_a` action matrix. Each planning call starts from N(0, I), draws
//! candidates (clamped to the action bounds), scores them through a
//! caller-supplied function, and refits to the elite moments. The score
//! function receives `(candidate, seed)` so implementations can derive
//! per-candidate sampling streams; scoring runs in parallel and the result
//! is identical for any thread count.

use rayon::prelude::*;

use crate::error::{FeefError, Result};
use crate::math::gaussian::softmax_stable;
use crate::rng::{derive_seed_path, Rng};
use rand::Rng as _;
use rand_distr::StandardNormal;

/// Refit variance floor: keeps later iterations exploring instead of
/// collapsing to a point before the final refit.
pub const CEM_VARIANCE_FLOOR: f64 = 1e-3;

pub(crate) const TAG_CANDIDATE: u64 = 0x63656d;

#[derive(Debug, Clone)]
pub struct CemConfig {
    pub candidates: usize,
    pub elites: usize,
    pub iterations: usize,
    pub horizon: usize,
}

impl Default for CemConfig {
    fn default() -> Self {
        Self {
            candidates: 700,
            elites: 70,
            iterations: 7,
            horizon: 30,
        }
    }
}

impl CemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidates == 0 || self.elites == 0 || self.iterations == 0 || self.horizon == 0 {
            return Err(FeefError::InvalidConfig(
                "CEM candidates, elites, iterations and horizon must be positive".into(),
            ));
        }
        if self.elites > self.candidates {
            return Err(FeefError::InvalidConfig(format!(
                "CEM elites ({}) cannot exceed candidates ({})",
                self.elites, self.candidates
            )));
        }
        Ok(())
    }
}

/// Diagonal Gaussian over flattened action sequences, with the per-dimension
/// action bounds it was fitted under.
#[derive(Debug, Clone)]
pub struct PolicyDist {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub horizon: usize,
}

impl PolicyDist {
    /// N(0, I) over `horizon × bounds.len()` action values.
    pub fn standard(horizon: usize, bounds: &[(f64, f64)]) -> Self {
        let n = horizon * bounds.len();
        Self {
            mean: vec![0.0; n],
            variance: vec![1.0; n],
            bounds: bounds.to_vec(),
            horizon,
        }
    }

    pub fn action_dim(&self) -> usize {
        self.bounds.len()
    }
}

/// Per-iteration progress plus the degraded flag set when an iteration had
/// fewer finite-scoring candidates than elites.
#[derive(Debug, Clone, Default)]
pub struct PlanDiagnostics {
    pub best_scores: Vec<f64>,
    pub mean_scores: Vec<f64>,
    pub degraded: bool,
}

/// Elite-moment refit: mean/variance are the elementwise population moments
/// of the `k` highest-scoring candidates (ties broken toward lower index),
/// variance floored and mean clamped to the bounds.
pub fn refit(
    candidates: &[Vec<f64>],
    scores: &[f64],
    k: usize,
    bounds: &[(f64, f64)],
) -> Result<PolicyDist> {
    if candidates.len() != scores.len() {
        return Err(FeefError::DimensionMismatch(format!(
            "refit: {} candidates but {} scores",
            candidates.len(),
            scores.len()
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).filter(|&j| scores[j].is_finite()).collect();
    if order.len() < k {
        return Err(FeefError::TooFewFiniteScores {
            needed: k,
            got: order.len(),
        });
    }
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let elites = &order[..k];
    let n = candidates[elites[0]].len();
    let horizon = n / bounds.len();
    let mut mean = vec![0.0; n];
    for &j in elites {
        for (m, v) in mean.iter_mut().zip(&candidates[j]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k as f64);
    let mut variance = vec![0.0; n];
    for &j in elites {
        for i in 0..n {
            let d = candidates[j][i] - mean[i];
            variance[i] += d * d;
        }
    }
    for (i, v) in variance.iter_mut().enumerate() {
        *v = (*v / k as f64).max(CEM_VARIANCE_FLOOR);
        let (lo, hi) = bounds[i % bounds.len()];
        mean[i] = mean[i].clamp(lo, hi);
    }
    Ok(PolicyDist {
        mean,
        variance,
        bounds: bounds.to_vec(),
        horizon,
    })
}

/// Optimize the policy distribution against `score_fn` (higher is better).
///
/// `score_fn(candidate, seed)` must be pure; the seed is derived from this
/// call's rng and the candidate's (iteration, index), so scoring can run in
/// parallel without losing determinism. The best candidate found so far
/// replaces the first sample of each later iteration, so a deterministic
/// score function makes the per-iteration best non-decreasing. Returns the
/// final distribution and per-iteration diagnostics; if an iteration yields
/// no finite score at all, planning stops early with `degraded` set.
pub fn plan<F>(
    score_fn: F,
    bounds: &[(f64, f64)],
    config: &CemConfig,
    rng: &mut Rng,
) -> Result<(PolicyDist, PlanDiagnostics)>
where
    F: Fn(&[f64], u64) -> f64 + Sync,
{
    config.validate()?;
    if bounds.is_empty() || bounds.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
        return Err(FeefError::InvalidConfig("invalid action bounds".into()));
    }
    let master = rng.gen::<u64>();
    let mut dist = PolicyDist::standard(config.horizon, bounds);
    let n = dist.mean.len();
    let mut diagnostics = PlanDiagnostics::default();
    let mut incumbent: Option<Vec<f64>> = None;
    for iter in 0..config.iterations {
        let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(config.candidates);
        for _ in 0..config.candidates {
            let mut c = vec![0.0; n];
            for i in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                let (lo, hi) = bounds[i % bounds.len()];
                c[i] = (dist.mean[i] + dist.variance[i].sqrt() * z).clamp(lo, hi);
            }
            candidates.push(c);
        }
        if let Some(best) = &incumbent {
            candidates[0].copy_from_slice(best);
        }
        let seeds: Vec<u64> = (0..config.candidates)
            .map(|j| derive_seed_path(master, &[TAG_CANDIDATE, iter as u64, j as u64]))
            .collect();
        let scores: Vec<f64> = candidates
            .par_iter()
            .zip(&seeds)
            .map(|(c, &seed)| score_fn(c, seed))
            .collect();
        let mut best_j = None;
        let mut finite_sum = 0.0;
        let mut finite_count = 0usize;
        for (j, &s) in scores.iter().enumerate() {
            if !s.is_finite() {
                continue;
            }
            finite_sum += s;
            finite_count += 1;
            if best_j.map_or(true, |b: usize| s > scores[b]) {
                best_j = Some(j);
            }
        }
        let Some(best_j) = best_j else {
            diagnostics.degraded = true;
            return Ok((dist, diagnostics));
        };
        diagnostics.best_scores.push(scores[best_j]);
        diagnostics.mean_scores.push(finite_sum / finite_count as f64);
        incumbent = Some(candidates[best_j].clone());
        dist = refit(&candidates, &scores, config.elites, bounds)?;
    }
    Ok((dist, diagnostics))
}

/// The action the agent executes: the first step of the most likely policy
/// (the distribution's mean), clamped to bounds.
pub fn act(dist: &PolicyDist) -> Vec<f64> {
    let d_a = dist.action_dim();
    dist.mean[..d_a]
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let (lo, hi) = dist.bounds[i];
            m.clamp(lo, hi)
        })
        .collect()
}

/// Softmax over candidate scores: the discrete policy posterior implied by
/// treating each score as a log-weight. Diagnostic only; −∞ maps to 0.
pub fn policy_weights(scores: &[f64]) -> Vec<f64> {
    softmax_stable(scores)
}
