use std::fmt::Write as _;

use super::log::EpisodeLog;
use crate::geometry::Point;
use crate::gridworld::{BeliefCell, GroundTruthMap, Occupancy, OccupancyBelief};

const CELL_PX: f64 = 8.0;

fn lerp_color(t: f64) -> String {
    // Blue at the start of the episode, red at the end.
    let t = t.clamp(0.0, 1.0);
    let r = (40.0 + 215.0 * t).round() as u8;
    let g = (90.0 + 40.0 * (1.0 - (2.0 * t - 1.0).abs())).round() as u8;
    let b = (230.0 * (1.0 - t) + 25.0).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

struct Canvas {
    height_px: f64,
    scale: f64,
}

impl Canvas {
    fn x(&self, p: Point) -> f64 {
        p.x * self.scale
    }

    fn y(&self, p: Point) -> f64 {
        self.height_px - p.y * self.scale
    }
}

fn header(out: &mut String, w: usize, h: usize) -> Canvas {
    let (wp, hp) = (w as f64 * CELL_PX, h as f64 * CELL_PX);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{wp}" height="{hp}" viewBox="0 0 {wp} {hp}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect width="{wp}" height="{hp}" fill="#ffffff"/>"##
    );
    Canvas {
        height_px: hp,
        scale: 0.0,
    }
}

/// Cells as rects; row runs of equal color are merged to keep files small.
fn cells(
    out: &mut String,
    w: usize,
    h: usize,
    color: impl Fn(usize, usize) -> Option<&'static str>,
) {
    let _ = writeln!(out, r#"<g class="cells">"#);
    for y in 0..h {
        let mut x = 0;
        while x < w {
            let c = color(x, y);
            let mut end = x + 1;
            while end < w && color(end, y) == c {
                end += 1;
            }
            if let Some(fill) = c {
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
                    x as f64 * CELL_PX,
                    (h - 1 - y) as f64 * CELL_PX,
                    (end - x) as f64 * CELL_PX,
                    CELL_PX
                );
            }
            x = end;
        }
    }
    let _ = writeln!(out, "</g>");
}

fn trajectory(out: &mut String, canvas: &Canvas, poses: &[Point]) {
    if poses.len() < 2 {
        if let Some(p) = poses.first() {
            let _ = writeln!(
                out,
                r##"<circle class="pose" cx="{}" cy="{}" r="4" fill="#2a5ae6"/>"##,
                canvas.x(*p),
                canvas.y(*p)
            );
        }
        return;
    }
    let points: Vec<String> = poses
        .iter()
        .map(|p| format!("{},{}", canvas.x(*p), canvas.y(*p)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline class="trajectory" points="{}" fill="none" stroke="#888888" stroke-width="1"/>"##,
        points.join(" ")
    );
    let _ = writeln!(
        out,
        r#"<g class="time-graded" stroke-width="2.5" stroke-linecap="round">"#
    );
    let last = (poses.len() - 1) as f64;
    for (i, w) in poses.windows(2).enumerate() {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}"/>"#,
            canvas.x(w[0]),
            canvas.y(w[0]),
            canvas.x(w[1]),
            canvas.y(w[1]),
            lerp_color(i as f64 / last)
        );
    }
    let _ = writeln!(out, "</g>");
    let start = poses[0];
    let _ = writeln!(
        out,
        r##"<circle class="start" cx="{}" cy="{}" r="4" fill="#2a5ae6"/>"##,
        canvas.x(start),
        canvas.y(start)
    );
}

/// Trajectory over the ground-truth map, graded from blue (early) to red
/// (late), with global path terminals marked as diamonds.
pub fn render_trajectory(log: &EpisodeLog, map: &GroundTruthMap) -> String {
    let waypoints: Vec<Point> = log.plans().map(|p| p.target).collect();
    let (w, h) = (map.width(), map.height());
    let mut out = String::new();
    let mut canvas = header(&mut out, w, h);
    canvas.scale = CELL_PX / map.resolution();
    cells(&mut out, w, h, |x, y| {
        (map.get(x, y) == Occupancy::Occupied).then_some("#333333")
    });
    markers(&mut out, &canvas, &waypoints);
    trajectory(&mut out, &canvas, &log.poses());
    out.push_str("</svg>\n");
    out
}

fn markers(out: &mut String, canvas: &Canvas, waypoints: &[Point]) {
    let _ = writeln!(
        out,
        r##"<g class="waypoints" fill="#f2a900" stroke="#7a5500">"##
    );
    for p in waypoints {
        let (x, y) = (canvas.x(*p), canvas.y(*p));
        let _ = writeln!(
            out,
            r#"<polygon points="{},{} {},{} {},{} {},{}"/>"#,
            x,
            y - 5.0,
            x + 5.0,
            y,
            x,
            y + 5.0,
            x - 5.0,
            y
        );
    }
    let _ = writeln!(out, "</g>");
}

/// Belief map with optional node colors, used for community views.
pub fn render_belief(
    belief: &OccupancyBelief,
    nodes: &[(Point, String)],
    edges: &[(Point, Point)],
) -> String {
    let (w, h) = (belief.width(), belief.height());
    let mut out = String::new();
    let mut canvas = header(&mut out, w, h);
    canvas.scale = CELL_PX / belief.resolution();
    cells(&mut out, w, h, |x, y| match belief.get(x, y) {
        BeliefCell::Unknown => Some("#c8c8c8"),
        BeliefCell::Occupied => Some("#333333"),
        BeliefCell::Free => None,
    });
    let _ = writeln!(
        out,
        r##"<g class="edges" stroke="#9a9a9a" stroke-width="1">"##
    );
    for (a, b) in edges {
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            canvas.x(*a),
            canvas.y(*a),
            canvas.x(*b),
            canvas.y(*b)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="nodes">"#);
    for (p, color) in nodes {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
            canvas.x(*p),
            canvas.y(*p)
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

/// Distinct, stable color for a community id.
pub fn community_color(id: usize) -> String {
    let hue = (id as f64 * 137.507_764) % 360.0;
    hsl_to_hex(hue, 0.65, 0.5)
}

fn hsl_to_hex(h: f64, s: f64, l: f64) -> String {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    let to = |v: f64| ((v + m) * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", to(r), to(g), to(b))
}
