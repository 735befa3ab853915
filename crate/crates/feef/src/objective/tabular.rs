//! Exact finite-space oracle for the objective's defining identities.
//!
//! With explicit tables over states, observations and model parameters,
//! every expectation is an exact sum, so the decomposition
//! (−score = information gain − extrinsic divergence) and the bound
//! (score ≥ KL between predicted and preferred observation marginals)
//! can be checked to float precision instead of estimator tolerance.

use rand::Rng as _;

use crate::error::{FeefError, Result};
use crate::rng::Rng;

const ROW_SUM_TOL: f64 = 1e-12;

/// Discrete generative model: q(θ), q(s|θ,π) per policy, q(o|s,θ), and the
/// preferred observation distribution p(o).
#[derive(Debug, Clone)]
pub struct TabularToyModel {
    /// q(θ), length |Θ|.
    pub prior_theta: Vec<f64>,
    /// q(s|θ,π), indexed [policy][θ][s].
    pub state_given_theta: Vec<Vec<Vec<f64>>>,
    /// q(o|s,θ), indexed [θ][s][o].
    pub obs_given_state_theta: Vec<Vec<Vec<f64>>>,
    /// p(o), the preferred outcome distribution, length |O|.
    pub preferred_obs: Vec<f64>,
}

/// All four enumerated quantities for one policy. `feef` is the free energy
/// (minimized), `info_gain − extrinsic == −feef` when the posterior used is
/// the exact Bayes posterior.
#[derive(Debug, Clone, Copy)]
pub struct TabularFeef {
    pub feef: f64,
    pub info_gain: f64,
    pub extrinsic: f64,
    /// KL( q(o|π) ∥ p(o) ): the quantity `feef` upper-bounds.
    pub bound_rhs: f64,
}

fn check_distribution(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|&p| !(0.0..=1.0 + ROW_SUM_TOL).contains(&p)) {
        return Err(FeefError::InvalidTable(format!(
            "{what} has entries outside [0, 1]"
        )));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL {
        return Err(FeefError::InvalidTable(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

impl TabularToyModel {
    pub fn num_policies(&self) -> usize {
        self.state_given_theta.len()
    }

    pub fn num_states(&self) -> usize {
        self.obs_given_state_theta[0].len()
    }

    pub fn num_obs(&self) -> usize {
        self.preferred_obs.len()
    }

    pub fn num_params(&self) -> usize {
        self.prior_theta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n_theta = self.prior_theta.len();
        if n_theta == 0 || self.state_given_theta.is_empty() || self.preferred_obs.is_empty() {
            return Err(FeefError::InvalidTable("empty table".into()));
        }
        check_distribution(&self.prior_theta, "q(θ)")?;
        check_distribution(&self.preferred_obs, "p(o)")?;
        if self.obs_given_state_theta.len() != n_theta {
            return Err(FeefError::InvalidTable("q(o|s,θ) θ count mismatch".into()));
        }
        let n_states = self.obs_given_state_theta[0].len();
        let n_obs = self.preferred_obs.len();
        for (pi, per_theta) in self.state_given_theta.iter().enumerate() {
            if per_theta.len() != n_theta {
                return Err(FeefError::InvalidTable(format!(
                    "q(s|θ,π={pi}) θ count mismatch"
                )));
            }
            for (t, row) in per_theta.iter().enumerate() {
                if row.len() != n_states {
                    return Err(FeefError::InvalidTable(format!(
                        "q(s|θ={t},π={pi}) state count mismatch"
                    )));
                }
                check_distribution(row, &format!("q(s|θ={t},π={pi})"))?;
            }
        }
        for (t, per_state) in self.obs_given_state_theta.iter().enumerate() {
            if per_state.len() != n_states {
                return Err(FeefError::InvalidTable(format!(
                    "q(o|s,θ={t}) state count mismatch"
                )));
            }
            for (s, row) in per_state.iter().enumerate() {
                if row.len() != n_obs {
                    return Err(FeefError::InvalidTable(format!(
                        "q(o|s={s},θ={t}) obs count mismatch"
                    )));
                }
                check_distribution(row, &format!("q(o|s={s},θ={t})"))?;
            }
        }
        Ok(())
    }

    /// Exact Bayes posterior q(s,θ|o,π), indexed [o][θ][s]. Rows for
    /// zero-probability observations are left as zeros.
    pub fn exact_posterior(&self, policy: usize) -> Result<Vec<Vec<Vec<f64>>>> {
        let (joint, q_o) = self.joint_and_marginal(policy)?;
        let (n_theta, n_states, n_obs) =
            (self.num_params(), self.num_states(), self.num_obs());
        let mut post = vec![vec![vec![0.0; n_states]; n_theta]; n_obs];
        for o in 0..n_obs {
            if q_o[o] <= 0.0 {
                continue;
            }
            for t in 0..n_theta {
                for s in 0..n_states {
                    post[o][t][s] = joint[t][s][o] / q_o[o];
                }
            }
        }
        Ok(post)
    }

    /// joint[θ][s][o] = q(θ)·q(s|θ,π)·q(o|s,θ) and its observation marginal.
    fn joint_and_marginal(&self, policy: usize) -> Result<(Vec<Vec<Vec<f64>>>, Vec<f64>)> {
        self.validate()?;
        if policy >= self.num_policies() {
            return Err(FeefError::InvalidConfig(format!(
                "policy index {policy} out of range ({} policies)",
                self.num_policies()
            )));
        }
        let (n_theta, n_states, n_obs) =
            (self.num_params(), self.num_states(), self.num_obs());
        let mut joint = vec![vec![vec![0.0; n_obs]; n_states]; n_theta];
        let mut q_o = vec![0.0; n_obs];
        for t in 0..n_theta {
            for s in 0..n_states {
                let base = self.prior_theta[t] * self.state_given_theta[policy][t][s];
                for o in 0..n_obs {
                    let p = base * self.obs_given_state_theta[t][s][o];
                    joint[t][s][o] = p;
                    q_o[o] += p;
                }
            }
        }
        Ok((joint, q_o))
    }
}

/// Enumerate the objective for `policy` using the exact Bayes posterior.
pub fn tabular_feef(toy: &TabularToyModel, policy: usize) -> Result<TabularFeef> {
    let posterior = toy.exact_posterior(policy)?;
    tabular_feef_with_posterior(toy, policy, &posterior)
}

/// Enumerate the objective with an explicit (possibly approximate) posterior
/// q̂(s,θ|o), indexed [o][θ][s]. The bound `feef ≥ bound_rhs` holds for any
/// normalized q̂, with slack E_{q(o|π)}[KL(exact posterior ∥ q̂)]; it is
/// tight exactly when q̂ is the Bayes posterior. Zero-probability
/// observations are excluded from all expectations.
pub fn tabular_feef_with_posterior(
    toy: &TabularToyModel,
    policy: usize,
    posterior: &[Vec<Vec<f64>>],
) -> Result<TabularFeef> {
    let (joint, q_o) = toy.joint_and_marginal(policy)?;
    let (n_theta, n_states, n_obs) = (toy.num_params(), toy.num_states(), toy.num_obs());
    if posterior.len() != n_obs
        || posterior
            .iter()
            .any(|per_t| per_t.len() != n_theta || per_t.iter().any(|row| row.len() != n_states))
    {
        return Err(FeefError::InvalidTable("posterior shape mismatch".into()));
    }
    for (o, per_t) in posterior.iter().enumerate() {
        if q_o[o] <= 0.0 {
            continue;
        }
        let flat: Vec<f64> = per_t.iter().flatten().copied().collect();
        check_distribution(&flat, &format!("posterior at o={o}"))?;
    }

    let p_pref = &toy.preferred_obs;
    // bound_rhs = KL(q(o|π) ∥ p(o))
    let mut bound_rhs = 0.0;
    for o in 0..n_obs {
        if q_o[o] > 0.0 {
            bound_rhs += q_o[o] * (q_o[o].ln() - p_pref[o].ln());
        }
    }

    // feef = E_joint[ ln joint − ln p(o) − ln q̂(s,θ|o) ]
    // info_gain = E_joint[ ln q̂(s,θ|o) − ln q(s,θ|π) ]
    // extrinsic = E_{q(s,θ|π)}[ KL(q(o|s,θ) ∥ p(o)) ]
    let mut feef = 0.0;
    let mut info_gain = 0.0;
    let mut extrinsic = 0.0;
    for t in 0..n_theta {
        for s in 0..n_states {
            let prior_joint = toy.prior_theta[t] * toy.state_given_theta[policy][t][s];
            if prior_joint <= 0.0 {
                continue;
            }
            for o in 0..n_obs {
                let p = joint[t][s][o];
                if p <= 0.0 {
                    continue;
                }
                let ln_post = posterior[o][t][s].ln();
                feef += p * (p.ln() - p_pref[o].ln() - ln_post);
                info_gain += p * (ln_post - prior_joint.ln());
                let lik = toy.obs_given_state_theta[t][s][o];
                extrinsic += prior_joint * lik * (lik.ln() - p_pref[o].ln());
            }
        }
    }
    Ok(TabularFeef {
        feef,
        info_gain,
        extrinsic,
        bound_rhs,
    })
}

/// Numerical tolerance for the exact-enumeration checks: the bound may
/// undershoot and the decomposition may deviate by at most this much.
pub const BOUND_TOL: f64 = 1e-9;

/// One exact-enumeration check on one (toy, policy) pair.
#[derive(Debug, Clone, Copy)]
pub struct BoundCase {
    pub toy: usize,
    pub policy: usize,
    /// feef − bound_rhs; the bound claims this is ≥ 0.
    pub slack: f64,
    /// |(−feef) − (info gain − extrinsic)|; the decomposition claims 0.
    pub residual: f64,
}

impl BoundCase {
    pub fn holds(&self) -> bool {
        self.slack >= -BOUND_TOL && self.residual < BOUND_TOL
    }
}

/// Evaluate the bound and decomposition on `toys` seeded random worlds,
/// every policy of each. The same suite backs the CLI `bound-check` and
/// the C ABI entry point.
pub fn bound_check_cases(toys: usize, seed: u64) -> Result<Vec<BoundCase>> {
    let mut rng = crate::rng::rng_from_seed(seed);
    let mut cases = Vec::new();
    for toy_index in 0..toys {
        let toy = random_toy(&mut rng, 3, 3, 2, 2);
        for policy in 0..toy.num_policies() {
            let exact = tabular_feef(&toy, policy)?;
            cases.push(BoundCase {
                toy: toy_index,
                policy,
                slack: exact.feef - exact.bound_rhs,
                residual: (-exact.feef - (exact.info_gain - exact.extrinsic)).abs(),
            });
        }
    }
    Ok(cases)
}

/// Random strictly-positive toy with the given table sizes; rows are
/// normalized draws bounded away from zero so every log stays finite.
pub fn random_toy(
    rng: &mut Rng,
    n_states: usize,
    n_obs: usize,
    n_theta: usize,
    n_policies: usize,
) -> TabularToyModel {
    let mut row = |n: usize| -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / sum).collect()
    };
    let prior_theta = row(n_theta);
    let state_given_theta = (0..n_policies)
        .map(|_| (0..n_theta).map(|_| row(n_states)).collect())
        .collect();
    let obs_given_state_theta = (0..n_theta)
        .map(|_| (0..n_states).map(|_| row(n_obs)).collect())
        .collect();
    let preferred_obs = row(n_obs);
    TabularToyModel {
        prior_theta,
        state_given_theta,
        obs_given_state_theta,
        preferred_obs,
    }
}

/// Blend the exact posterior with the uniform distribution over (θ, s):
/// a deliberately miscalibrated posterior for exercising the bound's slack.
pub fn perturbed_posterior(
    toy: &TabularToyModel,
    policy: usize,
    epsilon: f64,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut post = toy.exact_posterior(policy)?;
    let uniform = 1.0 / (toy.num_params() * toy.num_states()) as f64;
    for per_t in &mut post {
        let mass: f64 = per_t.iter().flatten().sum();
        if mass <= 0.0 {
            // unused zero-probability row: any normalized filler works
            for row in per_t.iter_mut() {
                row.iter_mut().for_each(|v| *v = uniform);
            }
            continue;
        }
        for row in per_t.iter_mut() {
            for v in row.iter_mut() {
                *v = (1.0 - epsilon) * *v + epsilon * uniform;
            }
        }
    }
    Ok(post)
}
