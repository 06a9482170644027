use super::belief::{BeliefCell, OccupancyBelief};
use super::map::neighbors4;
use crate::geometry::Point;

/// Free cells 4-adjacent to at least one unknown cell.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrontierSet {
    /// Cell indices `(column, row)`, row-major order.
    pub cells: Vec<(usize, usize)>,
    /// Cell centers in meters, parallel to `cells`.
    pub points: Vec<Point>,
}

impl FrontierSet {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }
}

pub fn is_frontier(belief: &OccupancyBelief, x: usize, y: usize) -> bool {
    belief.get(x, y) == BeliefCell::Free
        && neighbors4(x, y, belief.width(), belief.height())
            .any(|(nx, ny)| belief.get(nx, ny) == BeliefCell::Unknown)
}

pub fn detect_frontiers(belief: &OccupancyBelief) -> FrontierSet {
    let mut set = FrontierSet::default();
    for y in 0..belief.height() {
        for x in 0..belief.width() {
            if is_frontier(belief, x, y) {
                set.cells.push((x, y));
                set.points.push(belief.cell_center(x, y));
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_unknown_is_not_a_frontier() {
        use BeliefCell::*;
        let b = OccupancyBelief::from_cells(2, 2, 1.0, vec![Free, Occupied, Occupied, Unknown]);
        assert!(!is_frontier(&b, 0, 0));
        let b = OccupancyBelief::from_cells(2, 1, 1.0, vec![Free, Unknown]);
        assert!(is_frontier(&b, 0, 0));
        assert!(!is_frontier(&b, 1, 0));
    }
}
