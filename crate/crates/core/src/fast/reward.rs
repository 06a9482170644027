use serde::{Deserialize, Serialize};

use super::FastError;
use crate::geometry::Point;
use crate::gridworld::OccupancyBelief;

/// Normalized distance between the selected and the guided waypoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub raw: f64,
    /// `raw` clamped to `[0, 1]` for the reward.
    pub clamped: f64,
}

/// `|w - w*| / (4 node_res sqrt 2)`: the diagonal of a four-node square is
/// the largest admissible deviation.
pub fn deviation(w: Point, w_star: Point, node_resolution: f64) -> Result<Deviation, FastError> {
    if !(node_resolution > 0.0) {
        return Err(FastError::InvalidResolution(node_resolution));
    }
    let raw = w.distance(&w_star) / (4.0 * node_resolution * std::f64::consts::SQRT_2);
    Ok(Deviation {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// `-(e^d - 1) / (e - 1)`, from 0 at `d = 0` down to -1 at `d = 1`.
pub fn instruction_reward(d: f64) -> Result<f64, FastError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(FastError::Domain(d));
    }
    // Subtracting from zero keeps r(0) at +0 rather than -0.
    Ok(0.0 - d.exp_m1() / (std::f64::consts::E - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub alpha_obs: f64,
    pub alpha_dev: f64,
    pub done_bonus: f64,
    pub step_cost: f64,
    /// Cells revealable by one full scan.
    pub normalizer: f64,
}

impl RewardConfig {
    pub fn new(normalizer: f64) -> Self {
        Self {
            alpha_obs: 1.0,
            alpha_dev: 0.5,
            done_bonus: 20.0,
            step_cost: 0.02,
            normalizer,
        }
    }
}

/// Exploration gain plus guidance following, completion bonus and step cost.
pub fn step_reward(
    prev: &OccupancyBelief,
    next: &OccupancyBelief,
    d_t: f64,
    done: bool,
    cfg: &RewardConfig,
) -> Result<f64, FastError> {
    let revealed = next.known_count().saturating_sub(prev.known_count());
    reward_from_parts(revealed, d_t, done, cfg)
}

pub fn reward_from_parts(
    revealed: usize,
    d_t: f64,
    done: bool,
    cfg: &RewardConfig,
) -> Result<f64, FastError> {
    let obs = revealed as f64 / cfg.normalizer.max(1.0);
    let bonus = if done { cfg.done_bonus } else { 0.0 };
    Ok(cfg.alpha_obs * obs + cfg.alpha_dev * instruction_reward(d_t)? + bonus - cfg.step_cost)
}
