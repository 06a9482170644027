use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GridError;
use crate::geometry::Point;

/// Ground-truth label of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Occupancy {
    Free,
    Occupied,
}

/// Procedural environment family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Indoor,
    Forest,
    Warehouse,
    Custom,
}

impl MapKind {
    pub const GENERATED: [MapKind; 3] = [MapKind::Indoor, MapKind::Forest, MapKind::Warehouse];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapKind::Indoor => "indoor",
            MapKind::Forest => "forest",
            MapKind::Warehouse => "warehouse",
            MapKind::Custom => "custom",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapKind {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "indoor" => Ok(MapKind::Indoor),
            "forest" => Ok(MapKind::Forest),
            "warehouse" => Ok(MapKind::Warehouse),
            "custom" => Ok(MapKind::Custom),
            other => Err(GridError::Parse(format!("unknown map kind `{other}`"))),
        }
    }
}

/// Metadata shared by map files and belief snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapHeader {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
    pub kind: MapKind,
    pub seed: u64,
    /// Start cell `(column, row)`.
    pub start: (usize, usize),
}

/// Immutable ground-truth environment.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthMap {
    header: MapHeader,
    cells: Vec<Occupancy>,
}

impl GroundTruthMap {
    /// Builds a map from raw cells (row-major, row 0 first), checking the
    /// bounded-environment invariants.
    pub fn from_cells(header: MapHeader, cells: Vec<Occupancy>) -> Result<Self, GridError> {
        let (w, h) = (header.width, header.height);
        if w < 3 || h < 3 {
            return Err(GridError::InvalidMap(format!("grid {w}x{h} too small")));
        }
        if cells.len() != w * h {
            return Err(GridError::InvalidMap(format!(
                "expected {} cells, got {}",
                w * h,
                cells.len()
            )));
        }
        if !(header.resolution > 0.0) || !header.resolution.is_finite() {
            return Err(GridError::InvalidMap("resolution must be positive".into()));
        }
        for x in 0..w {
            for y in 0..h {
                let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
                if border && cells[y * w + x] != Occupancy::Occupied {
                    return Err(GridError::InvalidMap(format!(
                        "border cell ({x}, {y}) is free"
                    )));
                }
            }
        }
        let (sx, sy) = header.start;
        if sx >= w || sy >= h || cells[sy * w + sx] != Occupancy::Free {
            return Err(GridError::InvalidMap(format!(
                "start cell ({sx}, {sy}) is not free"
            )));
        }
        Ok(Self { header, cells })
    }

    /// Parses an ASCII layout (`.` free, `#` occupied, `S` free start cell),
    /// first line is row 0. Mostly useful for hand-built test maps.
    pub fn from_ascii(rows: &[&str], resolution: f64) -> Result<Self, GridError> {
        let height = rows.len();
        let width = rows.first().map(|r| r.chars().count()).unwrap_or(0);
        let mut cells = Vec::with_capacity(width * height);
        let mut start = None;
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(GridError::Parse(format!("row {y} has inconsistent width")));
            }
            for (x, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '.' => Occupancy::Free,
                    '#' => Occupancy::Occupied,
                    'S' => {
                        start = Some((x, y));
                        Occupancy::Free
                    }
                    other => return Err(GridError::Parse(format!("unexpected cell `{other}`"))),
                });
            }
        }
        let start = start
            .or_else(|| {
                cells
                    .iter()
                    .position(|c| *c == Occupancy::Free)
                    .map(|i| (i % width.max(1), i / width.max(1)))
            })
            .ok_or_else(|| GridError::InvalidMap("no free cell".into()))?;
        let header = MapHeader {
            width,
            height,
            resolution,
            kind: MapKind::Custom,
            seed: 0,
            start,
        };
        Self::from_cells(header, cells)
    }

    pub fn header(&self) -> &MapHeader {
        &self.header
    }

    pub fn width(&self) -> usize {
        self.header.width
    }

    pub fn height(&self) -> usize {
        self.header.height
    }

    pub fn resolution(&self) -> f64 {
        self.header.resolution
    }

    pub fn kind(&self) -> MapKind {
        self.header.kind
    }

    pub fn seed(&self) -> u64 {
        self.header.seed
    }

    pub fn start_cell(&self) -> (usize, usize) {
        self.header.start
    }

    pub fn start_pose(&self) -> Point {
        let (x, y) = self.header.start;
        self.cell_center(x, y)
    }

    pub fn cells(&self) -> &[Occupancy] {
        &self.cells
    }

    pub fn get(&self, x: usize, y: usize) -> Occupancy {
        self.cells[y * self.header.width + x]
    }

    /// Label at signed coordinates; out-of-bounds reads as occupied.
    pub fn get_signed(&self, x: i64, y: i64) -> Occupancy {
        if x < 0 || y < 0 || x as usize >= self.header.width || y as usize >= self.header.height {
            Occupancy::Occupied
        } else {
            self.get(x as usize, y as usize)
        }
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point {
        let r = self.header.resolution;
        Point::new((x as f64 + 0.5) * r, (y as f64 + 0.5) * r)
    }

    /// Cell containing `p`, if inside the map.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        cell_of(
            p,
            self.header.width,
            self.header.height,
            self.header.resolution,
        )
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|c| **c == Occupancy::Free).count()
    }

    pub fn free_fraction(&self) -> f64 {
        self.free_count() as f64 / self.cells.len() as f64
    }

    /// Free cells 4-connected to the start cell.
    pub fn reachable_free(&self) -> Vec<bool> {
        let (w, h) = (self.header.width, self.header.height);
        let mut seen = vec![false; w * h];
        let (sx, sy) = self.header.start;
        let mut queue = VecDeque::from([(sx, sy)]);
        seen[sy * w + sx] = true;
        while let Some((x, y)) = queue.pop_front() {
            for (nx, ny) in neighbors4(x, y, w, h) {
                let i = ny * w + nx;
                if !seen[i] && self.cells[i] == Occupancy::Free {
                    seen[i] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        seen
    }
}

pub(crate) fn cell_of(
    p: Point,
    width: usize,
    height: usize,
    resolution: f64,
) -> Option<(usize, usize)> {
    if !(p.x >= 0.0 && p.y >= 0.0) {
        return None;
    }
    let x = (p.x / resolution).floor() as usize;
    let y = (p.y / resolution).floor() as usize;
    (x < width && y < height).then_some((x, y))
}

pub(crate) fn neighbors4(
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let mut out = [(usize::MAX, usize::MAX); 4];
    let mut n = 0;
    if x > 0 {
        out[n] = (x - 1, y);
        n += 1;
    }
    if x + 1 < w {
        out[n] = (x + 1, y);
        n += 1;
    }
    if y > 0 {
        out[n] = (x, y - 1);
        n += 1;
    }
    if y + 1 < h {
        out[n] = (x, y + 1);
        n += 1;
    }
    out.into_iter().take(n)
}
