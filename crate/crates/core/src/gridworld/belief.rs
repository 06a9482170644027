use serde::{Deserialize, Serialize};

use super::map::{cell_of, GroundTruthMap, Occupancy};
use crate::geometry::Point;

/// Belief label of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BeliefCell {
    Unknown,
    Free,
    Occupied,
}

impl From<Occupancy> for BeliefCell {
    fn from(o: Occupancy) -> Self {
        match o {
            Occupancy::Free => BeliefCell::Free,
            Occupancy::Occupied => BeliefCell::Occupied,
        }
    }
}

/// The robot's partial map. Cells only ever move out of `Unknown`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyBelief {
    width: usize,
    height: usize,
    resolution: f64,
    cells: Vec<BeliefCell>,
    free: usize,
    occupied: usize,
}

impl OccupancyBelief {
    /// All-unknown belief with the same shape as `truth`.
    pub fn unknown_like(truth: &GroundTruthMap) -> Self {
        Self::unknown(truth.width(), truth.height(), truth.resolution())
    }

    pub fn unknown(width: usize, height: usize, resolution: f64) -> Self {
        Self {
            width,
            height,
            resolution,
            cells: vec![BeliefCell::Unknown; width * height],
            free: 0,
            occupied: 0,
        }
    }

    /// Belief that already knows every cell of `truth`.
    pub fn fully_known(truth: &GroundTruthMap) -> Self {
        let cells: Vec<BeliefCell> = truth.cells().iter().map(|&o| o.into()).collect();
        Self::from_cells(truth.width(), truth.height(), truth.resolution(), cells)
    }

    pub fn from_cells(
        width: usize,
        height: usize,
        resolution: f64,
        cells: Vec<BeliefCell>,
    ) -> Self {
        assert_eq!(cells.len(), width * height, "belief cell count mismatch");
        let free = cells.iter().filter(|c| **c == BeliefCell::Free).count();
        let occupied = cells.iter().filter(|c| **c == BeliefCell::Occupied).count();
        Self {
            width,
            height,
            resolution,
            cells,
            free,
            occupied,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[BeliefCell] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> BeliefCell {
        self.cells[y * self.width + x]
    }

    /// Label at signed coordinates; out-of-bounds reads as unknown.
    pub fn get_signed(&self, x: i64, y: i64) -> BeliefCell {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            BeliefCell::Unknown
        } else {
            self.get(x as usize, y as usize)
        }
    }

    pub fn is_free_signed(&self, x: i64, y: i64) -> bool {
        self.get_signed(x, y) == BeliefCell::Free
    }

    /// Reveals a cell. Returns `true` if it was unknown before; known cells
    /// are never relabeled.
    pub fn reveal(&mut self, x: usize, y: usize, label: Occupancy) -> bool {
        let i = y * self.width + x;
        if self.cells[i] != BeliefCell::Unknown {
            return false;
        }
        self.cells[i] = label.into();
        match label {
            Occupancy::Free => self.free += 1,
            Occupancy::Occupied => self.occupied += 1,
        }
        true
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point {
        Point::new(
            (x as f64 + 0.5) * self.resolution,
            (y as f64 + 0.5) * self.resolution,
        )
    }

    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        cell_of(p, self.width, self.height, self.resolution)
    }

    pub fn is_free_at(&self, p: Point) -> bool {
        self.cell_of(p)
            .is_some_and(|(x, y)| self.get(x, y) == BeliefCell::Free)
    }

    pub fn free_count(&self) -> usize {
        self.free
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied
    }

    pub fn known_count(&self) -> usize {
        self.free + self.occupied
    }

    pub fn unknown_count(&self) -> usize {
        self.cells.len() - self.known_count()
    }

    /// Checks that every known cell agrees with `truth`.
    pub fn consistent_with(&self, truth: &GroundTruthMap) -> bool {
        self.cells.iter().zip(truth.cells()).all(|(b, t)| match b {
            BeliefCell::Unknown => true,
            known => *known == BeliefCell::from(*t),
        })
    }
}
