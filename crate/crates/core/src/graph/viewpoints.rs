use serde::{Deserialize, Serialize};

use super::{GraphError, NodeId};
use crate::geometry::Point;
use crate::gridworld::{BeliefCell, OccupancyBelief};

/// A candidate robot position on the sampling lattice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewpoint {
    pub id: NodeId,
    pub position: Point,
    /// Number of frontier cells observable from here.
    pub utility: u32,
}

/// Sampling lattice of pitch `node_resolution` laid over the map.
///
/// Lattice cell `(i, j)` has id `j * cols + i`, so ids stay stable as the
/// belief grows. Its viewpoint sits at the center of the map cell containing
/// the lattice-cell center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub pitch: f64,
    pub cols: usize,
    pub rows: usize,
    map_resolution: f64,
    map_width: usize,
    map_height: usize,
}

impl Lattice {
    pub fn new(belief: &OccupancyBelief, node_resolution: f64) -> Result<Self, GraphError> {
        let res = belief.resolution();
        if !(node_resolution >= res) || !node_resolution.is_finite() {
            return Err(GraphError::InvalidResolution {
                node: node_resolution,
                map: res,
            });
        }
        let cols = ((belief.width() as f64 * res) / node_resolution).floor() as usize;
        let rows = ((belief.height() as f64 * res) / node_resolution).floor() as usize;
        Ok(Self {
            pitch: node_resolution,
            cols,
            rows,
            map_resolution: res,
            map_width: belief.width(),
            map_height: belief.height(),
        })
    }

    pub fn id(&self, i: usize, j: usize) -> NodeId {
        (j * self.cols + i) as NodeId
    }

    pub fn coords(&self, id: NodeId) -> (usize, usize) {
        let id = id as usize;
        (id % self.cols, id / self.cols)
    }

    /// Map cell hosting the viewpoint of lattice cell `(i, j)`.
    pub fn host_cell(&self, i: usize, j: usize) -> Option<(usize, usize)> {
        let cx = (i as f64 + 0.5) * self.pitch;
        let cy = (j as f64 + 0.5) * self.pitch;
        let x = (cx / self.map_resolution).floor() as usize;
        let y = (cy / self.map_resolution).floor() as usize;
        (x < self.map_width && y < self.map_height).then_some((x, y))
    }

    pub fn position(&self, id: NodeId) -> Option<Point> {
        let (i, j) = self.coords(id);
        self.host_cell(i, j).map(|(x, y)| {
            Point::new(
                (x as f64 + 0.5) * self.map_resolution,
                (y as f64 + 0.5) * self.map_resolution,
            )
        })
    }

    /// Lattice cell whose viewpoint is closest to `p`.
    pub fn nearest_id(&self, p: Point) -> NodeId {
        let i = ((p.x / self.pitch).floor().max(0.0) as usize).min(self.cols.saturating_sub(1));
        let j = ((p.y / self.pitch).floor().max(0.0) as usize).min(self.rows.saturating_sub(1));
        self.id(i, j)
    }
}

/// One viewpoint per lattice cell whose host cell is known free, sorted by id.
/// Utilities are left at zero.
pub fn sample_viewpoints(
    belief: &OccupancyBelief,
    node_resolution: f64,
) -> Result<Vec<Viewpoint>, GraphError> {
    let lattice = Lattice::new(belief, node_resolution)?;
    let mut out = Vec::new();
    for j in 0..lattice.rows {
        for i in 0..lattice.cols {
            if let Some((x, y)) = lattice.host_cell(i, j) {
                if belief.get(x, y) == BeliefCell::Free {
                    out.push(Viewpoint {
                        id: lattice.id(i, j),
                        position: belief.cell_center(x, y),
                        utility: 0,
                    });
                }
            }
        }
    }
    Ok(out)
}
