use super::belief::OccupancyBelief;
use super::map::{GroundTruthMap, Occupancy};
use super::GridError;
use crate::geometry::{traverse, Flow, Point};

/// Planar omnidirectional range sensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeSensor {
    /// Sensing range in meters.
    pub range: f64,
    pub rays: usize,
}

impl Default for RangeSensor {
    fn default() -> Self {
        Self {
            range: 6.0,
            rays: 360,
        }
    }
}

/// Cells whose label changed during one scan.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScanReport {
    pub revealed: Vec<(usize, usize)>,
}

impl ScanReport {
    pub fn revealed_count(&self) -> usize {
        self.revealed.len()
    }
}

/// Casts `sensor.rays` evenly spaced rays from `pose` and reveals every cell on
/// each ray up to and including the first occupied cell, within range.
pub fn sense_and_update(
    belief: &mut OccupancyBelief,
    truth: &GroundTruthMap,
    pose: Point,
    sensor: RangeSensor,
) -> Result<ScanReport, GridError> {
    if !(sensor.range > 0.0) {
        return Err(GridError::InvalidSensor(format!(
            "range {} must be positive",
            sensor.range
        )));
    }
    if sensor.rays < 8 {
        return Err(GridError::InvalidSensor(format!(
            "need at least 8 rays, got {}",
            sensor.rays
        )));
    }
    let (px, py) = truth
        .cell_of(pose)
        .ok_or(GridError::PoseOutOfBounds(pose))?;
    if truth.get(px, py) == Occupancy::Occupied {
        return Err(GridError::PoseInObstacle(pose));
    }
    let res = truth.resolution();
    let (w, h) = (truth.width() as i64, truth.height() as i64);
    let mut report = ScanReport::default();
    for k in 0..sensor.rays {
        let theta = std::f64::consts::TAU * k as f64 / sensor.rays as f64;
        let dir = (theta.cos(), theta.sin());
        traverse(pose, dir, sensor.range, res, |_, group| {
            let mut blocked = false;
            for &(cx, cy) in group {
                if cx < 0 || cy < 0 || cx >= w || cy >= h {
                    blocked = true;
                    continue;
                }
                let (ux, uy) = (cx as usize, cy as usize);
                let label = truth.get(ux, uy);
                if belief.reveal(ux, uy, label) {
                    report.revealed.push((ux, uy));
                }
                blocked |= label == Occupancy::Occupied;
            }
            if blocked {
                Flow::Stop
            } else {
                Flow::Continue
            }
        });
    }
    Ok(report)
}

/// Number of cells whose centers lie within `range` of a cell center; the
/// most one scan can reveal in open space.
pub fn scan_footprint(range: f64, resolution: f64) -> usize {
    let r = (range / resolution).floor() as i64;
    let limit = (range / resolution).powi(2);
    let mut count = 0;
    for dx in -r..=r {
        for dy in -r..=r {
            if ((dx * dx + dy * dy) as f64) <= limit {
                count += 1;
            }
        }
    }
    count
}
