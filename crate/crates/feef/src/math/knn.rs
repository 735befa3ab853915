//! Nonparametric differential entropy from samples (Kozachenko–Leonenko,
//! Kraskov bias correction):
//!
//! Ĥ = ψ(N) − ψ(k) + ln V_d + (d/N) Σᵢ ln εᵢ
//!
//! where εᵢ is the Euclidean distance from sample i to its k-th nearest
//! neighbor and V_d the unit-ball volume. Neighbor search is brute force;
//! the sample counts used here (≤ a few thousand) don't justify a tree.

use crate::error::{FeefError, Result};

/// Distances below this are clamped before the log so duplicate samples
/// yield a (very negative) finite estimate instead of −∞.
pub const DISTANCE_FLOOR: f64 = 1e-12;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// ψ(n) for integer n ≥ 1: ψ(n) = −γ + Σ_{j=1}^{n−1} 1/j.
pub fn digamma_integer(n: usize) -> f64 {
    assert!(n >= 1, "digamma_integer requires n >= 1");
    let mut h = 0.0;
    for j in 1..n {
        h += 1.0 / j as f64;
    }
    h - EULER_GAMMA
}

/// ln Γ(n2/2) for integer n2 ≥ 1, built from Γ(1/2) = √π, Γ(1) = 1 and the
/// recurrence Γ(x+1) = xΓ(x). Exact up to float rounding; no series.
fn ln_gamma_half(n2: usize) -> f64 {
    assert!(n2 >= 1);
    let (mut ln_g, start) = if n2 % 2 == 1 {
        (0.5 * std::f64::consts::PI.ln(), 1)
    } else {
        (0.0, 2)
    };
    let mut m = start;
    while m < n2 {
        ln_g += (m as f64 / 2.0).ln();
        m += 2;
    }
    ln_g
}

/// ln of the unit-ball volume in d dimensions: (d/2)·ln π − ln Γ(d/2 + 1).
pub fn ln_ball_volume(d: usize) -> f64 {
    assert!(d >= 1);
    (d as f64 / 2.0) * std::f64::consts::PI.ln() - ln_gamma_half(d + 2)
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// Nearest-neighbor squared distance for a compile-time dimension. The
/// planner calls the k = 1 estimator once per imagined step on low-dim
/// states, so the distance loop must unroll; a runtime `dim` defeats that.
fn min_nn_sq_fixed<const D: usize>(points: &[f64], i: usize) -> f64 {
    let pi = &points[i * D..(i + 1) * D];
    let mut min_sq = f64::INFINITY;
    for (j, pj) in points.chunks_exact(D).enumerate() {
        if j != i {
            let mut d2 = 0.0;
            for k in 0..D {
                let diff = pi[k] - pj[k];
                d2 += diff * diff;
            }
            if d2 < min_sq {
                min_sq = d2;
            }
        }
    }
    min_sq
}

/// Squared distance to the k-th nearest neighbor of `points[i]` among the
/// other rows. `best` is a scratch of length k holding the k smallest seen.
fn kth_nn_sq(points: &[f64], dim: usize, n: usize, i: usize, best: &mut [f64]) -> f64 {
    debug_assert_eq!(points.len(), n * dim);
    let pi = &points[i * dim..(i + 1) * dim];
    if best.len() == 1 {
        // k = 1 with a bare running minimum; dims past the specialized few
        // fall back to the generic distance
        let min_sq = match dim {
            1 => min_nn_sq_fixed::<1>(points, i),
            2 => min_nn_sq_fixed::<2>(points, i),
            3 => min_nn_sq_fixed::<3>(points, i),
            4 => min_nn_sq_fixed::<4>(points, i),
            5 => min_nn_sq_fixed::<5>(points, i),
            6 => min_nn_sq_fixed::<6>(points, i),
            _ => {
                let mut min_sq = f64::INFINITY;
                for (j, pj) in points.chunks_exact(dim).enumerate() {
                    if j != i {
                        let d2 = squared_distance(pi, pj);
                        if d2 < min_sq {
                            min_sq = d2;
                        }
                    }
                }
                min_sq
            }
        };
        best[0] = min_sq;
        return min_sq;
    }
    best.iter_mut().for_each(|b| *b = f64::INFINITY);
    for (j, pj) in points.chunks_exact(dim).enumerate() {
        if j == i {
            continue;
        }
        let d2 = squared_distance(pi, pj);
        // replace the current worst of the k best if this one beats it
        let mut worst_idx = 0;
        for idx in 1..best.len() {
            if best[idx] > best[worst_idx] {
                worst_idx = idx;
            }
        }
        if d2 < best[worst_idx] {
            best[worst_idx] = d2;
        }
    }
    best.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

/// Entropy estimate from `n` samples of dimension `dim`, stored row-major in
/// `points` (`points.len() == n * dim`). Requires `n ≥ k + 1`.
pub fn knn_entropy(points: &[f64], dim: usize, k: usize) -> Result<f64> {
    if dim == 0 || k == 0 {
        return Err(FeefError::InvalidConfig(
            "knn_entropy: dim and k must be positive".into(),
        ));
    }
    if points.len() % dim != 0 {
        return Err(FeefError::DimensionMismatch(format!(
            "knn_entropy: {} values do not tile dimension {}",
            points.len(),
            dim
        )));
    }
    let n = points.len() / dim;
    if n < k + 1 {
        return Err(FeefError::TooFewSamples { needed: k + 1, got: n });
    }
    let mut best = vec![f64::INFINITY; k];
    let mut log_sum = 0.0;
    for i in 0..n {
        let eps = kth_nn_sq(points, dim, n, i, &mut best).sqrt();
        log_sum += eps.max(DISTANCE_FLOOR).ln();
    }
    Ok(digamma_integer(n) - digamma_integer(k)
        + ln_ball_volume(dim)
        + (dim as f64 / n as f64) * log_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;
    use rand_distr::StandardNormal;

    const GAUSSIAN_1D_ENTROPY: f64 = 1.418_938_533_204_672_7;

    #[test]
    fn digamma_small_integers() {
        assert!((digamma_integer(1) + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma_integer(2) - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        // ψ(10) = H₉ − γ
        let h9: f64 = (1..10).map(|j| 1.0 / j as f64).sum();
        assert!((digamma_integer(10) - (h9 - EULER_GAMMA)).abs() < 1e-15);
        assert!((digamma_integer(10) - 2.251_752_589_066_721).abs() < 1e-12);
    }

    #[test]
    fn ball_volumes_match_closed_forms() {
        use std::f64::consts::PI;
        assert!((ln_ball_volume(1) - 2.0f64.ln()).abs() < 1e-15);
        assert!((ln_ball_volume(2) - PI.ln()).abs() < 1e-15);
        assert!((ln_ball_volume(3) - (4.0 * PI / 3.0).ln()).abs() < 1e-14);
        // V₄ = π²/2
        assert!((ln_ball_volume(4) - (PI * PI / 2.0).ln()).abs() < 1e-14);
        // V₅ = 8π²/15
        assert!((ln_ball_volume(5) - (8.0 * PI * PI / 15.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn standard_normal_1d_entropy() {
        let mut rng = rng_from_seed(1234);
        let points: Vec<f64> = (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let h = knn_entropy(&points, 1, 1).unwrap();
        assert!(
            (h - GAUSSIAN_1D_ENTROPY).abs() < 0.05,
            "estimate {h}, true {GAUSSIAN_1D_ENTROPY}"
        );
    }

    #[test]
    fn uniform_unit_interval_entropy_is_zero() {
        let mut rng = rng_from_seed(99);
        let points: Vec<f64> = (0..10_000).map(|_| rng.gen_range(0.0..1.0)).collect();
        let h = knn_entropy(&points, 1, 1).unwrap();
        assert!(h.abs() < 0.05, "estimate {h}, true 0");
    }

    #[test]
    fn standard_normal_2d_entropy_is_twice_1d() {
        let mut rng = rng_from_seed(7);
        let points: Vec<f64> = (0..8_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let h = knn_entropy(&points, 2, 1).unwrap();
        assert!(
            (h - 2.0 * GAUSSIAN_1D_ENTROPY).abs() < 0.08,
            "estimate {h}, true {}",
            2.0 * GAUSSIAN_1D_ENTROPY
        );
    }

    #[test]
    fn scaling_by_s_shifts_entropy_by_ln_s() {
        // H(sX) = H(X) + ln s exactly; the estimator inherits this
        // identity up to the distance floor, so the shift is exact.
        let mut rng = rng_from_seed(21);
        let base: Vec<f64> = (0..2_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let scaled: Vec<f64> = base.iter().map(|x| 3.0 * x).collect();
        let h0 = knn_entropy(&base, 1, 1).unwrap();
        let h1 = knn_entropy(&scaled, 1, 1).unwrap();
        assert!((h1 - h0 - 3.0f64.ln()).abs() < 1e-9, "shift {}", h1 - h0);
    }

    #[test]
    fn identical_points_give_finite_estimate() {
        let points = vec![0.5; 40];
        let h = knn_entropy(&points, 1, 1).unwrap();
        assert!(h.is_finite());
        assert!(h < -10.0, "duplicates should look very concentrated, got {h}");
    }

    #[test]
    fn k_greater_than_one_is_supported() {
        let mut rng = rng_from_seed(4);
        let points: Vec<f64> = (0..5_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let h = knn_entropy(&points, 1, 3).unwrap();
        assert!((h - GAUSSIAN_1D_ENTROPY).abs() < 0.05, "k=3 estimate {h}");
    }

    #[test]
    fn too_few_samples_is_an_error() {
        assert!(matches!(
            knn_entropy(&[1.0], 1, 1),
            Err(FeefError::TooFewSamples { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn ragged_input_is_an_error() {
        assert!(knn_entropy(&[1.0, 2.0, 3.0], 2, 1).is_err());
    }

    /// Estimator error shrinks as N grows: mean absolute error over several
    /// seeds at N = 4000 should beat N = 250.
    #[test]
    fn error_shrinks_with_sample_size() {
        let mean_abs_err = |n: usize| -> f64 {
            let mut total = 0.0;
            for seed in 0..10u64 {
                let mut rng = rng_from_seed(1000 + seed);
                let points: Vec<f64> =
                    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let h = knn_entropy(&points, 1, 1).unwrap();
                total += (h - GAUSSIAN_1D_ENTROPY).abs();
            }
            total / 10.0
        };
        assert!(mean_abs_err(4000) < mean_abs_err(250));
    }
}
