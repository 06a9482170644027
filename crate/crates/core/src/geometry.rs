//! Continuous points and supercover grid traversal.

use serde::{Deserialize, Serialize};

/// A position in meters, in the map frame (origin at the lower-left map corner).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Integer cell coordinates `(column, row)`.
pub type CellIndex = (i64, i64);

/// Whether the traversal should keep going after the current group of cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Relative tolerance under which two boundary crossings count as simultaneous
/// (the ray passes through a cell corner).
const CORNER_EPS: f64 = 1e-9;

/// Walks the supercover of the ray `origin + t * dir` for `t` in `[0, max_t]`.
///
/// Cells are reported in groups that are entered at the same parameter `t`.
/// The first group is the cell containing `origin`. When the ray passes
/// through a cell corner both side cells are reported together with the
/// diagonal cell. `dir` must be a unit vector so that `t` is in meters.
pub fn traverse<F>(origin: Point, dir: (f64, f64), max_t: f64, resolution: f64, mut visit: F)
where
    F: FnMut(f64, &[CellIndex]) -> Flow,
{
    let mut ix = (origin.x / resolution).floor() as i64;
    let mut iy = (origin.y / resolution).floor() as i64;
    if visit(0.0, &[(ix, iy)]) == Flow::Stop {
        return;
    }
    let (dx, dy) = dir;
    let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
    let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
    let delta_x = if dx != 0.0 {
        resolution / dx.abs()
    } else {
        f64::INFINITY
    };
    let delta_y = if dy != 0.0 {
        resolution / dy.abs()
    } else {
        f64::INFINITY
    };
    let mut next_x = if dx > 0.0 {
        ((ix + 1) as f64 * resolution - origin.x) / dx
    } else if dx < 0.0 {
        (origin.x - ix as f64 * resolution) / -dx
    } else {
        f64::INFINITY
    };
    let mut next_y = if dy > 0.0 {
        ((iy + 1) as f64 * resolution - origin.y) / dy
    } else if dy < 0.0 {
        (origin.y - iy as f64 * resolution) / -dy
    } else {
        f64::INFINITY
    };
    let eps = CORNER_EPS * resolution;
    let mut group: Vec<CellIndex> = Vec::with_capacity(3);
    loop {
        let t = next_x.min(next_y);
        if t > max_t || !t.is_finite() {
            return;
        }
        group.clear();
        if (next_x - next_y).abs() <= eps {
            group.push((ix + step_x, iy));
            group.push((ix, iy + step_y));
            ix += step_x;
            iy += step_y;
            group.push((ix, iy));
            next_x += delta_x;
            next_y += delta_y;
        } else if next_x < next_y {
            ix += step_x;
            group.push((ix, iy));
            next_x += delta_x;
        } else {
            iy += step_y;
            group.push((ix, iy));
            next_y += delta_y;
        }
        if visit(t, &group) == Flow::Stop {
            return;
        }
    }
}

/// All supercover cells of the closed segment `a -> b`, in traversal order.
pub fn segment_cells(a: Point, b: Point, resolution: f64) -> Vec<CellIndex> {
    let mut out = Vec::new();
    for_each_segment_cell(a, b, resolution, |c| {
        out.push(c);
        Flow::Continue
    });
    out
}

/// Visits the supercover cells of the closed segment `a -> b` until `visit`
/// returns [`Flow::Stop`].
pub fn for_each_segment_cell<F>(a: Point, b: Point, resolution: f64, mut visit: F)
where
    F: FnMut(CellIndex) -> Flow,
{
    let len = a.distance(&b);
    if len == 0.0 {
        let c = (
            (a.x / resolution).floor() as i64,
            (a.y / resolution).floor() as i64,
        );
        visit(c);
        return;
    }
    let dir = ((b.x - a.x) / len, (b.y - a.y) / len);
    let end_slack = CORNER_EPS * resolution;
    traverse(a, dir, len + end_slack, resolution, |_, cells| {
        for &c in cells {
            if visit(c) == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_segment_visits_row() {
        let cells = segment_cells(Point::new(0.5, 0.5), Point::new(3.5, 0.5), 1.0);
        assert_eq!(cells, vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn diagonal_through_corner_includes_side_cells() {
        let cells = segment_cells(Point::new(0.5, 0.5), Point::new(1.5, 1.5), 1.0);
        assert_eq!(cells, vec![(0, 0), (1, 0), (0, 1), (1, 1)]);
    }

    #[test]
    fn degenerate_segment_is_single_cell() {
        let cells = segment_cells(Point::new(2.2, 3.7), Point::new(2.2, 3.7), 1.0);
        assert_eq!(cells, vec![(2, 3)]);
    }

    #[test]
    fn negative_direction() {
        let cells = segment_cells(Point::new(3.5, 2.5), Point::new(0.5, 2.5), 1.0);
        assert_eq!(cells, vec![(3, 2), (2, 2), (1, 2), (0, 2)]);
    }
}
