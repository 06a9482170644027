//! Plain-text grid files.
//!
//! ```text
//! width 64
//! height 64
//! resolution 0.4
//! kind warehouse
//! seed 7
//! start 31 31
//! ################...
//! ```
//!
//! One character per cell, row 0 first: `.` free, `#` occupied and, in
//! belief snapshots only, `U` unknown. Writing a parsed file reproduces it
//! byte for byte.

use std::fmt::Write as _;

use super::belief::{BeliefCell, OccupancyBelief};
use super::map::{GroundTruthMap, MapHeader, MapKind, Occupancy};
use super::GridError;

const HEADER_KEYS: [&str; 6] = ["width", "height", "resolution", "kind", "seed", "start"];

fn write_header(out: &mut String, h: &MapHeader) {
    let _ = writeln!(out, "width {}", h.width);
    let _ = writeln!(out, "height {}", h.height);
    let _ = writeln!(out, "resolution {}", h.resolution);
    let _ = writeln!(out, "kind {}", h.kind);
    let _ = writeln!(out, "seed {}", h.seed);
    let _ = writeln!(out, "start {} {}", h.start.0, h.start.1);
}

pub fn write_map(map: &GroundTruthMap) -> String {
    let mut out = String::with_capacity(map.width() * (map.height() + 1) + 96);
    write_header(&mut out, map.header());
    for y in 0..map.height() {
        for x in 0..map.width() {
            out.push(match map.get(x, y) {
                Occupancy::Free => '.',
                Occupancy::Occupied => '#',
            });
        }
        out.push('\n');
    }
    out
}

/// Writes a belief snapshot using `header` for the metadata lines.
pub fn write_belief(belief: &OccupancyBelief, header: &MapHeader) -> String {
    let mut out = String::with_capacity(belief.width() * (belief.height() + 1) + 96);
    write_header(&mut out, header);
    for y in 0..belief.height() {
        for x in 0..belief.width() {
            out.push(match belief.get(x, y) {
                BeliefCell::Free => '.',
                BeliefCell::Occupied => '#',
                BeliefCell::Unknown => 'U',
            });
        }
        out.push('\n');
    }
    out
}

fn parse_header<'a, I: Iterator<Item = &'a str>>(lines: &mut I) -> Result<MapHeader, GridError> {
    let mut values: Vec<&str> = Vec::with_capacity(HEADER_KEYS.len());
    for key in HEADER_KEYS {
        let line = lines
            .next()
            .ok_or_else(|| GridError::Parse(format!("missing `{key}` header line")))?;
        let rest = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| GridError::Parse(format!("expected `{key} ...`, got `{line}`")))?;
        values.push(rest);
    }
    let num = |s: &str, what: &str| -> Result<usize, GridError> {
        s.parse()
            .map_err(|_| GridError::Parse(format!("bad {what} `{s}`")))
    };
    let (sx, sy) = values[5]
        .split_once(' ')
        .ok_or_else(|| GridError::Parse("start needs two coordinates".into()))?;
    Ok(MapHeader {
        width: num(values[0], "width")?,
        height: num(values[1], "height")?,
        resolution: values[2]
            .parse()
            .map_err(|_| GridError::Parse(format!("bad resolution `{}`", values[2])))?,
        kind: values[3].parse::<MapKind>()?,
        seed: values[4]
            .parse()
            .map_err(|_| GridError::Parse(format!("bad seed `{}`", values[4])))?,
        start: (num(sx, "start column")?, num(sy, "start row")?),
    })
}

fn parse_rows<'a, I, T, F>(lines: I, header: &MapHeader, mut cell: F) -> Result<Vec<T>, GridError>
where
    I: Iterator<Item = &'a str>,
    F: FnMut(char) -> Option<T>,
{
    let mut cells = Vec::with_capacity(header.width * header.height);
    let mut rows = 0;
    for line in lines {
        if rows == header.height {
            return Err(GridError::Parse("trailing data after grid rows".into()));
        }
        if line.chars().count() != header.width {
            return Err(GridError::Parse(format!("row {rows} has wrong width")));
        }
        for ch in line.chars() {
            cells
                .push(cell(ch).ok_or_else(|| GridError::Parse(format!("unexpected cell `{ch}`")))?);
        }
        rows += 1;
    }
    if rows != header.height {
        return Err(GridError::Parse(format!(
            "expected {} rows, got {rows}",
            header.height
        )));
    }
    Ok(cells)
}

fn split_lines(text: &str) -> Result<std::str::Split<'_, char>, GridError> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| GridError::Parse("file must end with a newline".into()))?;
    Ok(body.split('\n'))
}

pub fn parse_map(text: &str) -> Result<GroundTruthMap, GridError> {
    let mut lines = split_lines(text)?;
    let header = parse_header(&mut lines)?;
    let cells = parse_rows(lines, &header, |c| match c {
        '.' => Some(Occupancy::Free),
        '#' => Some(Occupancy::Occupied),
        _ => None,
    })?;
    GroundTruthMap::from_cells(header, cells)
}

pub fn parse_belief(text: &str) -> Result<(MapHeader, OccupancyBelief), GridError> {
    let mut lines = split_lines(text)?;
    let header = parse_header(&mut lines)?;
    let cells = parse_rows(lines, &header, |c| match c {
        '.' => Some(BeliefCell::Free),
        '#' => Some(BeliefCell::Occupied),
        'U' => Some(BeliefCell::Unknown),
        _ => None,
    })?;
    let belief = OccupancyBelief::from_cells(header.width, header.height, header.resolution, cells);
    Ok((header, belief))
}
