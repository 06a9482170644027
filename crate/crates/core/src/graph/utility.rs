use std::collections::HashMap;

use super::collision::segment_is_free;
use super::NodeId;
use crate::geometry::Point;
use crate::gridworld::{FrontierSet, OccupancyBelief};

/// Frontier cells within `range` of `position` with a collision-free line of sight.
pub fn compute_utility(
    position: Point,
    frontiers: &FrontierSet,
    belief: &OccupancyBelief,
    range: f64,
) -> u32 {
    let r2 = range * range;
    frontiers
        .points
        .iter()
        .filter(|f| f.distance_sq(&position) <= r2)
        .filter(|f| segment_is_free(belief, position, **f))
        .count() as u32
}

/// Distance to the closest frontier cell that `compute_utility` would count.
pub fn nearest_visible_frontier(
    position: Point,
    frontiers: &FrontierSet,
    belief: &OccupancyBelief,
    range: f64,
) -> Option<f64> {
    let r2 = range * range;
    let mut near: Vec<(f64, Point)> = frontiers
        .points
        .iter()
        .map(|f| (f.distance_sq(&position), *f))
        .filter(|(d, _)| *d <= r2)
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    near.into_iter()
        .find(|(_, f)| segment_is_free(belief, position, *f))
        .map(|(d, _)| d.sqrt())
}

/// Utilities keyed by viewpoint id, refreshed only near newly revealed cells.
#[derive(Clone, Debug, Default)]
pub struct UtilityCache {
    values: HashMap<NodeId, u32>,
}

impl UtilityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: NodeId) -> Option<u32> {
        self.values.get(&id).copied()
    }

    /// Recomputes utilities of `nodes` that are new or lie within reach of a
    /// revealed cell. A frontier or line of sight can only change if a cell on
    /// it (or next to it) was revealed, so other nodes keep their value.
    pub fn refresh(
        &mut self,
        nodes: &[(NodeId, Point)],
        revealed: &[(usize, usize)],
        frontiers: &FrontierSet,
        belief: &OccupancyBelief,
        range: f64,
    ) {
        let res = belief.resolution();
        let reach = range + 2.0 * res;
        let reach2 = reach * reach;
        let revealed_pts: Vec<Point> = revealed
            .iter()
            .map(|&(x, y)| belief.cell_center(x, y))
            .collect();
        let bbox = revealed_pts.iter().fold(
            (
                f64::INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::NEG_INFINITY,
            ),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        );
        for &(id, pos) in nodes {
            let stale = match self.values.get(&id) {
                None => true,
                Some(_) => {
                    pos.x >= bbox.0 - reach
                        && pos.x <= bbox.2 + reach
                        && pos.y >= bbox.1 - reach
                        && pos.y <= bbox.3 + reach
                        && revealed_pts.iter().any(|p| p.distance_sq(&pos) <= reach2)
                }
            };
            if stale {
                self.values
                    .insert(id, compute_utility(pos, frontiers, belief, range));
            }
        }
    }
}
