//! Occupancy-grid coverage over a bounded 2-D state subspace.

use super::EnvSpec;

/// Fixed-resolution occupancy grid. Occupancy only accumulates, so the
/// fraction is monotone non-decreasing over an experiment.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    bins: usize,
    dims: [usize; 2],
    bounds: [(f64, f64); 2],
    occupied: Vec<bool>,
}

impl CoverageGrid {
    pub fn new(bins: usize, dims: [usize; 2], bounds: [(f64, f64); 2]) -> Self {
        assert!(bins > 0);
        assert!(bounds.iter().all(|(lo, hi)| lo < hi));
        Self {
            bins,
            dims,
            bounds,
            occupied: vec![false; bins * bins],
        }
    }

    pub fn for_env(spec: &EnvSpec) -> Self {
        Self::new(super::COVERAGE_BINS, spec.coverage_dims, spec.coverage_bounds)
    }

    fn bin(&self, axis: usize, value: f64) -> usize {
        let (lo, hi) = self.bounds[axis];
        let t = (value - lo) / (hi - lo);
        // out-of-range states land in the edge bins
        (((t * self.bins as f64) as isize).max(0) as usize).min(self.bins - 1)
    }

    pub fn record(&mut self, state: &[f64]) {
        let i = self.bin(0, state[self.dims[0]]);
        let j = self.bin(1, state[self.dims[1]]);
        self.occupied[i * self.bins + j] = true;
    }

    pub fn fraction(&self) -> f64 {
        let hit = self.occupied.iter().filter(|&&o| o).count();
        hit as f64 / self.occupied.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: [(f64, f64); 2] = [(0.0, 1.0), (0.0, 1.0)];

    #[test]
    fn empty_grid_covers_nothing() {
        let grid = CoverageGrid::new(10, [0, 1], UNIT);
        assert_eq!(grid.fraction(), 0.0);
    }

    #[test]
    fn one_state_per_bin_covers_everything() {
        let mut grid = CoverageGrid::new(10, [0, 1], UNIT);
        for i in 0..10 {
            for j in 0..10 {
                grid.record(&[(i as f64 + 0.5) / 10.0, (j as f64 + 0.5) / 10.0]);
            }
        }
        assert_eq!(grid.fraction(), 1.0);
    }

    #[test]
    fn one_full_row_is_a_tenth_of_a_ten_by_ten_grid() {
        let mut grid = CoverageGrid::new(10, [0, 1], UNIT);
        for j in 0..10 {
            grid.record(&[0.05, (j as f64 + 0.5) / 10.0]);
        }
        assert!((grid.fraction() - 0.10).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_states_clip_to_edge_bins() {
        let mut grid = CoverageGrid::new(10, [0, 1], UNIT);
        grid.record(&[-5.0, 0.5]);
        grid.record(&[5.0, 0.5]);
        grid.record(&[1.0, 1.0]); // upper boundary itself
        assert!((grid.fraction() - 3.0 / 100.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_is_monotone_under_recording() {
        let mut grid = CoverageGrid::new(5, [0, 1], UNIT);
        let mut last = 0.0;
        for i in 0..50 {
            let x = (i as f64 * 0.37) % 1.0;
            let y = (i as f64 * 0.61) % 1.0;
            grid.record(&[x, y]);
            let f = grid.fraction();
            assert!(f >= last);
            last = f;
        }
    }

    #[test]
    fn grid_can_select_non_leading_state_dims() {
        let mut grid = CoverageGrid::new(10, [2, 3], UNIT);
        grid.record(&[9.0, 9.0, 0.55, 0.15]);
        assert!((grid.fraction() - 0.01).abs() < 1e-12);
    }
}
