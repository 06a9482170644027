//! Procedural ground-truth maps.
//!
//! All structure is laid out on square blocks of [`STRUCTURE_UNIT`] cells so
//! that every free region contains a block center. With the default node
//! resolution (one block) every free cell is then observable from some
//! viewpoint.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::map::{GroundTruthMap, MapHeader, MapKind, Occupancy};
use super::GridError;

/// Side of a structure block, in cells.
pub const STRUCTURE_UNIT: usize = 3;
/// Smallest accepted map side, in cells.
pub const MIN_MAP_SIDE: usize = 16;

/// Block-level occupancy used while laying out structure.
struct Blocks {
    w: usize,
    h: usize,
    blocked: Vec<bool>,
}

impl Blocks {
    fn new(w: usize, h: usize) -> Self {
        let mut b = Self {
            w,
            h,
            blocked: vec![false; w * h],
        };
        for x in 0..w {
            b.set(x, 0, true);
            b.set(x, h - 1, true);
        }
        for y in 0..h {
            b.set(0, y, true);
            b.set(w - 1, y, true);
        }
        b
    }

    fn set(&mut self, x: usize, y: usize, v: bool) {
        self.blocked[y * self.w + x] = v;
    }

    fn get(&self, x: usize, y: usize) -> bool {
        self.blocked[y * self.w + x]
    }

    fn center_free_block(&self) -> Option<(usize, usize)> {
        let (cx, cy) = ((self.w as f64 - 1.0) / 2.0, (self.h as f64 - 1.0) / 2.0);
        // Nearest to the center, then lowest row, then lowest column.
        let mut best: Option<(f64, usize, usize)> = None;
        for y in 0..self.h {
            for x in 0..self.w {
                if self.get(x, y) {
                    continue;
                }
                let d = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                let key = (d, y, x);
                if best.is_none_or(|k| key < k) {
                    best = Some(key);
                }
            }
        }
        best.map(|(_, y, x)| (x, y))
    }

    /// Blocks every free block that is not 4-connected to `start`.
    fn seal_unreachable(&mut self, start: (usize, usize)) {
        let mut seen = vec![false; self.w * self.h];
        let mut queue = VecDeque::from([start]);
        seen[start.1 * self.w + start.0] = true;
        while let Some((x, y)) = queue.pop_front() {
            let cand = [
                (x.wrapping_sub(1), y),
                (x + 1, y),
                (x, y.wrapping_sub(1)),
                (x, y + 1),
            ];
            for (nx, ny) in cand {
                if nx < self.w && ny < self.h && !seen[ny * self.w + nx] && !self.get(nx, ny) {
                    seen[ny * self.w + nx] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        for i in 0..self.blocked.len() {
            if !seen[i] {
                self.blocked[i] = true;
            }
        }
    }
}

/// Generates a deterministic map of the requested family.
pub fn generate_map(
    kind: MapKind,
    seed: u64,
    width: usize,
    height: usize,
    resolution: f64,
) -> Result<GroundTruthMap, GridError> {
    if width < MIN_MAP_SIDE || height < MIN_MAP_SIDE {
        return Err(GridError::Generation(format!(
            "map {width}x{height} is below the {MIN_MAP_SIDE}x{MIN_MAP_SIDE} minimum"
        )));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(GridError::Generation(format!(
            "resolution {resolution} must be positive"
        )));
    }
    let salt = match kind {
        MapKind::Indoor => 0x1d00_u64,
        MapKind::Forest => 0xf0e5_u64,
        MapKind::Warehouse => 0x3a7e_u64,
        MapKind::Custom => {
            return Err(GridError::Generation(
                "custom maps are loaded, not generated".into(),
            ));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt);
    let mut blocks = Blocks::new(width / STRUCTURE_UNIT, height / STRUCTURE_UNIT);
    match kind {
        MapKind::Indoor => layout_indoor(&mut blocks, &mut rng),
        MapKind::Forest => layout_forest(&mut blocks, &mut rng),
        MapKind::Warehouse => layout_warehouse(&mut blocks, &mut rng),
        MapKind::Custom => unreachable!(),
    }
    let start_block = blocks
        .center_free_block()
        .ok_or_else(|| GridError::Generation("layout left no free space".into()))?;
    blocks.seal_unreachable(start_block);

    let u = STRUCTURE_UNIT;
    let mut cells = vec![Occupancy::Occupied; width * height];
    for y in 0..blocks.h * u {
        for x in 0..blocks.w * u {
            if !blocks.get(x / u, y / u) {
                cells[y * width + x] = Occupancy::Free;
            }
        }
    }
    let header = MapHeader {
        width,
        height,
        resolution,
        kind,
        seed,
        start: (start_block.0 * u + u / 2, start_block.1 * u + u / 2),
    };
    GroundTruthMap::from_cells(header, cells)
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

impl Rect {
    fn w(&self) -> usize {
        self.x1 - self.x0 + 1
    }
    fn h(&self) -> usize {
        self.y1 - self.y0 + 1
    }
}

const MIN_ROOM: usize = 2;
const MAX_ROOM: usize = 5;

/// Rooms by recursive splitting; the first split lays a corridor.
fn layout_indoor(blocks: &mut Blocks, rng: &mut ChaCha8Rng) {
    let interior = Rect {
        x0: 1,
        y0: 1,
        x1: blocks.w - 2,
        y1: blocks.h - 2,
    };
    let mut doors: Vec<(usize, usize)> = Vec::new();
    split_room(blocks, rng, interior, 0, &mut doors);
}

fn split_room(
    blocks: &mut Blocks,
    rng: &mut ChaCha8Rng,
    r: Rect,
    depth: usize,
    doors: &mut Vec<(usize, usize)>,
) {
    let small = r.w() <= MAX_ROOM && r.h() <= MAX_ROOM;
    if small && (depth >= 2 || rng.gen_bool(0.6)) {
        return;
    }
    let corridor = depth < 2;
    // Band width taken by the separator: one wall, or wall-corridor-wall.
    let band = if corridor { 3 } else { 1 };
    let vertical_ok = r.w() >= 2 * MIN_ROOM + band;
    let horizontal_ok = r.h() >= 2 * MIN_ROOM + band;
    let vertical = match (vertical_ok, horizontal_ok) {
        (false, false) => {
            if corridor {
                // Too narrow for a corridor, try a plain wall.
                return split_room(blocks, rng, r, 2, doors);
            }
            return;
        }
        (true, false) => true,
        (false, true) => false,
        (true, true) => {
            if r.w() == r.h() {
                rng.gen_bool(0.5)
            } else {
                r.w() > r.h()
            }
        }
    };
    // Candidate offsets along the split axis; a wall may not end on a door.
    let blocked_by_door = |pos: usize| -> bool {
        (0..band).filter(|k| band == 1 || *k != 1).any(|k| {
            let p = pos + k;
            if vertical {
                doors.contains(&(p, r.y0 - 1)) || doors.contains(&(p, r.y1 + 1))
            } else {
                doors.contains(&(r.x0 - 1, p)) || doors.contains(&(r.x1 + 1, p))
            }
        })
    };
    let (lo, len) = if vertical {
        (r.x0, r.w())
    } else {
        (r.y0, r.h())
    };
    let candidates: Vec<usize> = (lo + MIN_ROOM..=lo + len - MIN_ROOM - band)
        .filter(|p| !blocked_by_door(*p))
        .collect();
    if candidates.is_empty() {
        return;
    }
    let pos = candidates[rng.gen_range(0..candidates.len())];
    let walls: Vec<usize> = if corridor {
        vec![pos, pos + 2]
    } else {
        vec![pos]
    };
    for &wpos in &walls {
        let (span_lo, span_hi) = if vertical { (r.y0, r.y1) } else { (r.x0, r.x1) };
        for s in span_lo..=span_hi {
            if vertical {
                blocks.set(wpos, s, true);
            } else {
                blocks.set(s, wpos, true);
            }
        }
        let mut door_count = 1;
        if span_hi - span_lo >= 6 && rng.gen_bool(0.35) {
            door_count = 2;
        }
        for _ in 0..door_count {
            let d = rng.gen_range(span_lo..=span_hi);
            let door = if vertical { (wpos, d) } else { (d, wpos) };
            blocks.set(door.0, door.1, false);
            doors.push(door);
        }
    }
    let (a, b) = if vertical {
        (
            Rect { x1: pos - 1, ..r },
            Rect {
                x0: pos + band,
                ..r
            },
        )
    } else {
        (
            Rect { y1: pos - 1, ..r },
            Rect {
                y0: pos + band,
                ..r
            },
        )
    };
    split_room(blocks, rng, a, depth + 1, doors);
    split_room(blocks, rng, b, depth + 1, doors);
}

/// Scattered round trees placed by dart-throwing Poisson-disc sampling.
fn layout_forest(blocks: &mut Blocks, rng: &mut ChaCha8Rng) {
    let (w, h) = (blocks.w as f64, blocks.h as f64);
    let min_dist = 2.9_f64;
    let attempts = 30 * blocks.w * blocks.h;
    let mut trees: Vec<(f64, f64, f64)> = Vec::new();
    for _ in 0..attempts {
        let x = rng.gen_range(1.0..w - 1.0);
        let y = rng.gen_range(1.0..h - 1.0);
        if trees
            .iter()
            .all(|(tx, ty, _)| (tx - x).powi(2) + (ty - y).powi(2) >= min_dist * min_dist)
        {
            let r = rng.gen_range(0.45..1.15);
            trees.push((x, y, r));
        }
    }
    for (tx, ty, r) in trees {
        let (x_lo, x_hi) = ((tx - r).floor().max(1.0) as usize, (tx + r).ceil() as usize);
        let (y_lo, y_hi) = ((ty - r).floor().max(1.0) as usize, (ty + r).ceil() as usize);
        for by in y_lo..=y_hi.min(blocks.h - 2) {
            for bx in x_lo..=x_hi.min(blocks.w - 2) {
                let (cx, cy) = (bx as f64 + 0.5, by as f64 + 0.5);
                if (cx - tx).powi(2) + (cy - ty).powi(2) <= r * r {
                    blocks.set(bx, by, true);
                }
            }
        }
    }
}

/// Parallel racks of box stacks separated by narrow aisles, with cross aisles.
fn layout_warehouse(blocks: &mut Blocks, rng: &mut ChaCha8Rng) {
    let vertical = rng.gen_bool(0.5);
    let (along, across) = if vertical {
        (blocks.h, blocks.w)
    } else {
        (blocks.w, blocks.h)
    };
    // Cross-aisle positions along the rack axis.
    let mut cross = Vec::new();
    let mut p = 2 + rng.gen_range(3..6);
    while p + 3 < along - 2 {
        cross.push(p);
        p += rng.gen_range(4..8);
    }
    // Rack lines across: 2, 4, 6, ... with the occasional wide aisle.
    let mut line = 2;
    while line <= across - 3 {
        if rng.gen_bool(0.15) {
            line += 1;
            continue;
        }
        let mut seg_start = 2;
        for &c in cross.iter().chain(std::iter::once(&(along - 2))) {
            let keep = rng.gen_bool(0.9);
            if keep {
                for s in seg_start..c {
                    if vertical {
                        blocks.set(line, s, true);
                    } else {
                        blocks.set(s, line, true);
                    }
                }
            }
            seg_start = c + 1;
        }
        line += 2;
    }
}
