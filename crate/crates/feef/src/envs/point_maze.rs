//! Reward-free point maze: a velocity-integrating point mass in the unit
//! square, divided into four rooms by axis-aligned walls with door gaps.
//! Every reward is exactly 0, so only intrinsically motivated agents have
//! any reason to move; success is measured by grid coverage.

use rand::Rng as _;

use super::{clamp_action, Env, EnvSpec};
use crate::rng::rng_from_seed;

const ACCEL: f64 = 0.01;
const DAMPING: f64 = 0.8;
const SPEED_LIMIT: f64 = 0.05;
const CONTACT_GAP: f64 = 1e-9;
const START_CENTER: (f64, f64) = (0.075, 0.5);
const START_JITTER: f64 = 0.05;

/// A wall segment: the plane `coord` on `axis` (0 = vertical wall at
/// x = coord, 1 = horizontal at y = coord), spanning [lo, hi] on the other
/// axis. Gaps between segments are the doors.
#[derive(Debug, Clone, Copy)]
pub struct Wall {
    pub axis: usize,
    pub coord: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Four rooms in a chain, widening away from the start: full-height walls
/// at x = 0.15, 0.4 and 0.65, each with two door gaps at [0.1, 0.25] and
/// [0.7, 0.85]. The doors line up across walls, so a deliberate straight
/// push can thread the whole maze while a diffusing walker has to find
/// three of them in sequence.
pub const WALLS: [Wall; 9] = [
    Wall { axis: 0, coord: 0.15, lo: 0.0, hi: 0.1 },
    Wall { axis: 0, coord: 0.15, lo: 0.25, hi: 0.7 },
    Wall { axis: 0, coord: 0.15, lo: 0.85, hi: 1.0 },
    Wall { axis: 0, coord: 0.4, lo: 0.0, hi: 0.1 },
    Wall { axis: 0, coord: 0.4, lo: 0.25, hi: 0.7 },
    Wall { axis: 0, coord: 0.4, lo: 0.85, hi: 1.0 },
    Wall { axis: 0, coord: 0.65, lo: 0.0, hi: 0.1 },
    Wall { axis: 0, coord: 0.65, lo: 0.25, hi: 0.7 },
    Wall { axis: 0, coord: 0.65, lo: 0.85, hi: 1.0 },
];

/// Fraction of the motion from `from` to `to` at which the wall plane is
/// crossed inside the wall's span, if it is. Starting exactly on the plane
/// counts as being on whichever side the motion leaves from.
pub fn wall_crossing(wall: &Wall, from: (f64, f64), to: (f64, f64)) -> Option<f64> {
    let (f_axis, t_axis, f_other, t_other) = if wall.axis == 0 {
        (from.0, to.0, from.1, to.1)
    } else {
        (from.1, to.1, from.0, to.0)
    };
    let before = f_axis - wall.coord;
    let after = t_axis - wall.coord;
    if before == 0.0 || before.signum() == after.signum() && after != 0.0 {
        return None;
    }
    let t = before / (f_axis - t_axis);
    let other = f_other + t * (t_other - f_other);
    ((wall.lo..=wall.hi).contains(&other)).then_some(t)
}

pub struct PointMaze {
    spec: EnvSpec,
}

impl PointMaze {
    pub fn new() -> Self {
        Self {
            spec: EnvSpec {
                name: "point_maze",
                state_dim: 4,
                action_dim: 2,
                action_bounds: vec![(-1.0, 1.0), (-1.0, 1.0)],
                max_steps: 300,
                r_max: 0.0,
                coverage_dims: [0, 1],
                coverage_bounds: [(0.0, 1.0), (0.0, 1.0)],
            },
        }
    }
}

impl Default for PointMaze {
    fn default() -> Self {
        Self::new()
    }
}

impl Env for PointMaze {
    fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    fn reset(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        let x = START_CENTER.0 + rng.gen_range(-START_JITTER..START_JITTER);
        let y = START_CENTER.1 + rng.gen_range(-START_JITTER..START_JITTER);
        vec![x, y, 0.0, 0.0]
    }

    fn step(&self, state: &[f64], action: &[f64]) -> (Vec<f64>, f64, bool) {
        let mut a = [0.0; 2];
        clamp_action(action, &self.spec.action_bounds, &mut a);
        let (x, y) = (state[0], state[1]);
        let mut vx = (DAMPING * state[2] + ACCEL * a[0]).clamp(-SPEED_LIMIT, SPEED_LIMIT);
        let mut vy = (DAMPING * state[3] + ACCEL * a[1]).clamp(-SPEED_LIMIT, SPEED_LIMIT);
        let mut nx = (x + vx).clamp(0.0, 1.0);
        let mut ny = (y + vy).clamp(0.0, 1.0);
        if nx != x + vx {
            vx = 0.0;
        }
        if ny != y + vy {
            vy = 0.0;
        }
        // contact stops the blocked axis at the wall face and zeroes the
        // velocity into the wall; motion along the face continues, so the
        // second pass re-checks the slide against the other axis's walls
        for _ in 0..2 {
            let first_hit = WALLS
                .iter()
                .filter_map(|w| wall_crossing(w, (x, y), (nx, ny)).map(|t| (t, w)))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let Some((_, wall)) = first_hit else { break };
            if wall.axis == 0 {
                nx = wall.coord - CONTACT_GAP * (nx - x).signum();
                vx = 0.0;
            } else {
                ny = wall.coord - CONTACT_GAP * (ny - y).signum();
                vy = 0.0;
            }
        }
        (vec![nx, ny, vx, vy], 0.0, false)
    }
}
