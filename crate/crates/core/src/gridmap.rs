//! Occupancy grid maps, footprint collision tests and the camera
//! obstruction ratio.
//!
//! Cell `(ix, iy)` covers `[ix, ix + 1) × [iy, iy + 1)` in cell units, where
//! cell units are world meters shifted by `origin` and divided by
//! `resolution`. `iy` grows with world `y`; the JSON format lists rows top
//! (highest `iy`) first.

use crate::geom::Point2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("malformed map JSON: {0}")]
    Json(String),
    #[error("zero rows")]
    ZeroRows,
    #[error("invalid `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("row {row} has length {found}, expected width {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {col}: unknown cell character {ch:?}")]
    BadCell { row: usize, col: usize, ch: char },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> MapError {
    MapError::InvalidField {
        field,
        reason: reason.into(),
    }
}

/// On-disk representation of a map.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub origin: [f64; 2],
    pub rows: Vec<String>,
}

/// A 2-D occupancy grid. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceMap {
    width: usize,
    height: usize,
    resolution: f64,
    origin: Point2,
    occupancy: Vec<bool>,
}

impl WorkspaceMap {
    /// `occupancy` is indexed `iy * width + ix`.
    pub fn new(
        width: usize,
        height: usize,
        resolution: f64,
        origin: Point2,
        occupancy: Vec<bool>,
    ) -> Result<Self, MapError> {
        if width == 0 {
            return Err(invalid("width", "must be at least 1"));
        }
        if height == 0 {
            return Err(invalid("height", "must be at least 1"));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(invalid(
                "resolution",
                format!("must be positive, got {resolution}"),
            ));
        }
        if !(origin.x.is_finite() && origin.y.is_finite()) {
            return Err(invalid("origin", "must be finite"));
        }
        if occupancy.len() != width * height {
            return Err(invalid(
                "occupancy",
                format!("expected {} cells, got {}", width * height, occupancy.len()),
            ));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
            occupancy,
        })
    }

    /// Builds a map from text rows (top row first), `#` obstacle and `.` free.
    pub fn from_rows<S: AsRef<str>>(
        rows: &[S],
        resolution: f64,
        origin: Point2,
    ) -> Result<Self, MapError> {
        if rows.is_empty() {
            return Err(MapError::ZeroRows);
        }
        let height = rows.len();
        let width = rows[0].as_ref().chars().count();
        let mut occupancy = vec![false; width * height];
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let found = row.chars().count();
            if found != width {
                return Err(MapError::RowLength {
                    row: r,
                    expected: width,
                    found,
                });
            }
            let iy = height - 1 - r;
            for (ix, ch) in row.chars().enumerate() {
                occupancy[iy * width + ix] = match ch {
                    '#' => true,
                    '.' => false,
                    other => {
                        return Err(MapError::BadCell {
                            row: r,
                            col: ix,
                            ch: other,
                        })
                    }
                };
            }
        }
        Self::new(width, height, resolution, origin, occupancy)
    }

    /// Parses the map JSON format.
    pub fn from_json(source: &str) -> Result<Self, MapError> {
        let file: MapFile =
            serde_json::from_str(source).map_err(|e| MapError::Json(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &MapFile) -> Result<Self, MapError> {
        if file.rows.is_empty() {
            return Err(MapError::ZeroRows);
        }
        if !(file.resolution.is_finite() && file.resolution > 0.0) {
            return Err(invalid(
                "resolution",
                format!("must be positive, got {}", file.resolution),
            ));
        }
        if file.width == 0 {
            return Err(invalid("width", "must be at least 1"));
        }
        if file.rows.len() != file.height {
            return Err(invalid(
                "height",
                format!(
                    "header says {} but {} rows given",
                    file.height,
                    file.rows.len()
                ),
            ));
        }
        if let Some((row, r)) = file
            .rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.chars().count() != file.width)
        {
            return Err(MapError::RowLength {
                row,
                expected: file.width,
                found: r.chars().count(),
            });
        }
        Self::from_rows(
            &file.rows,
            file.resolution,
            Point2::new(file.origin[0], file.origin[1]),
        )
    }

    pub fn to_file(&self) -> MapFile {
        let rows = (0..self.height)
            .rev()
            .map(|iy| {
                (0..self.width)
                    .map(|ix| if self.is_obstacle(ix, iy) { '#' } else { '.' })
                    .collect()
            })
            .collect();
        MapFile {
            width: self.width,
            height: self.height,
            resolution: self.resolution,
            origin: [self.origin.x, self.origin.y],
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("map serializes")
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

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    /// World coordinates of the upper-right map corner.
    pub fn extent(&self) -> Point2 {
        Point2::new(
            self.origin.x + self.width as f64 * self.resolution,
            self.origin.y + self.height as f64 * self.resolution,
        )
    }

    pub fn is_obstacle(&self, ix: usize, iy: usize) -> bool {
        self.occupancy[iy * self.width + ix]
    }

    /// Obstacle test that treats everything outside the grid as blocked.
    pub fn is_blocked(&self, ix: i64, iy: i64) -> bool {
        if ix < 0 || iy < 0 || ix >= self.width as i64 || iy >= self.height as i64 {
            return true;
        }
        self.is_obstacle(ix as usize, iy as usize)
    }

    pub fn obstacle_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    /// Returns a copy with the given cells marked as obstacles.
    pub fn with_obstacles(&self, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut map = self.clone();
        for (ix, iy) in cells {
            map.occupancy[iy * map.width + ix] = true;
        }
        map
    }

    /// Mirror image across the vertical axis through the map center.
    pub fn mirrored_x(&self) -> Self {
        let mut map = self.clone();
        for iy in 0..self.height {
            for ix in 0..self.width {
                map.occupancy[iy * self.width + (self.width - 1 - ix)] = self.is_obstacle(ix, iy);
            }
        }
        map
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + (ix as f64 + 0.5) * self.resolution,
            self.origin.y + (iy as f64 + 0.5) * self.resolution,
        )
    }

    /// The cell containing `p`, if it lies inside the grid.
    pub fn world_to_cell(&self, p: Point2) -> Option<(usize, usize)> {
        let c = self.to_cell_units(p);
        let (fx, fy) = (c.x.floor(), c.y.floor());
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }

    fn to_cell_units(&self, p: Point2) -> Point2 {
        Point2::new(
            (p.x - self.origin.x) / self.resolution,
            (p.y - self.origin.y) / self.resolution,
        )
    }

    /// True iff a disc of radius `rho` at `position` overlaps no obstacle
    /// cell and stays inside the map. Any cell whose square comes strictly
    /// closer than `rho` counts as overlapped.
    pub fn footprint_free(&self, position: Point2, rho: f64) -> bool {
        let c = self.to_cell_units(position);
        let rad = rho / self.resolution;
        if !(c.x.is_finite() && c.y.is_finite()) {
            return false;
        }
        if c.x < rad || c.y < rad || c.x > self.width as f64 - rad || c.y > self.height as f64 - rad
        {
            return false;
        }
        let rad2 = rad * rad;
        let (x_lo, x_hi) = cell_span(c.x, rad, self.width);
        let (y_lo, y_hi) = cell_span(c.y, rad, self.height);
        for iy in y_lo..=y_hi {
            for ix in x_lo..=x_hi {
                if self.is_obstacle(ix, iy) && cell_distance2(c, ix as f64, iy as f64) < rad2 {
                    return false;
                }
            }
        }
        true
    }

    /// True iff a disc of radius `rho` slides from `a` to `b` without
    /// overlapping an obstacle cell or leaving the map: no cell square comes
    /// strictly closer than `rho` to the segment.
    pub fn sweep_free(&self, a: Point2, b: Point2, rho: f64) -> bool {
        // the map is convex, so both end discs inside means the sweep is
        if !(self.footprint_free(a, rho) && self.footprint_free(b, rho)) {
            return false;
        }
        let (ca, cb) = (self.to_cell_units(a), self.to_cell_units(b));
        let rad = rho / self.resolution;
        let (x_lo, x_hi) = cell_span(
            (ca.x + cb.x) / 2.0,
            rad + (ca.x - cb.x).abs() / 2.0,
            self.width,
        );
        let (y_lo, y_hi) = cell_span(
            (ca.y + cb.y) / 2.0,
            rad + (ca.y - cb.y).abs() / 2.0,
            self.height,
        );
        for iy in y_lo..=y_hi {
            for ix in x_lo..=x_hi {
                if self.is_obstacle(ix, iy)
                    && segment_cell_distance2(ca, cb, ix as f64, iy as f64) < rad * rad
                {
                    return false;
                }
            }
        }
        true
    }

    /// Fraction of the disc of radius `r` around `position` covered by
    /// obstacle cells or lying outside the map.
    pub fn obstruction_ratio(&self, position: Point2, r: f64) -> f64 {
        let c = self.to_cell_units(position);
        let rad = r / self.resolution;
        let total = PI * rad * rad;
        let (w, h) = (self.width as f64, self.height as f64);

        let mut blocked = 0.0;
        let inside = c.x - rad >= 0.0 && c.y - rad >= 0.0 && c.x + rad <= w && c.y + rad <= h;
        if !inside {
            let in_map = disc_rect_area(rad, -c.x, w - c.x, -c.y, h - c.y);
            blocked += (total - in_map).max(0.0);
        }

        let rad2 = rad * rad;
        let x_lo = (c.x - rad).floor().max(0.0);
        let x_hi = (c.x + rad).floor().min(w - 1.0);
        let y_lo = (c.y - rad).floor().max(0.0);
        let y_hi = (c.y + rad).floor().min(h - 1.0);
        if x_lo <= x_hi && y_lo <= y_hi {
            for iy in y_lo as usize..=y_hi as usize {
                for ix in x_lo as usize..=x_hi as usize {
                    if !self.is_obstacle(ix, iy) {
                        continue;
                    }
                    let (fx, fy) = (ix as f64, iy as f64);
                    if cell_distance2(c, fx, fy) >= rad2 {
                        continue;
                    }
                    blocked += if cell_far_distance2(c, fx, fy) <= rad2 {
                        1.0
                    } else {
                        disc_rect_area(rad, fx - c.x, fx + 1.0 - c.x, fy - c.y, fy + 1.0 - c.y)
                    };
                }
            }
        }
        (blocked / total).clamp(0.0, 1.0)
    }

    /// Obstruction ratio at every cell center.
    pub fn obstruction_field(&self, r: f64) -> ObstructionField {
        let values = (0..self.height)
            .into_par_iter()
            .flat_map_iter(|iy| {
                (0..self.width).map(move |ix| self.obstruction_ratio(self.cell_center(ix, iy), r))
            })
            .collect();
        ObstructionField {
            width: self.width,
            height: self.height,
            radius: r,
            values,
        }
    }
}

/// Inclusive range of cell indices within `rad` of coordinate `c`, clipped
/// to the grid.
fn cell_span(c: f64, rad: f64, n: usize) -> (usize, usize) {
    let lo = (c - rad).floor().max(0.0) as usize;
    let hi = ((c + rad).floor().max(0.0) as usize).min(n - 1);
    (lo, hi)
}

fn cell_distance2(c: Point2, fx: f64, fy: f64) -> f64 {
    let dx = (fx - c.x).max(c.x - (fx + 1.0)).max(0.0);
    let dy = (fy - c.y).max(c.y - (fy + 1.0)).max(0.0);
    dx * dx + dy * dy
}

/// Squared distance between segment `a -> b` and the unit cell with lower
/// corner `(fx, fy)`.
fn segment_cell_distance2(a: Point2, b: Point2, fx: f64, fy: f64) -> f64 {
    // Liang-Barsky clip: any overlap means distance zero
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let mut crosses = true;
    for (p, q) in [
        (-d.x, a.x - fx),
        (d.x, fx + 1.0 - a.x),
        (-d.y, a.y - fy),
        (d.y, fy + 1.0 - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                crosses = false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if crosses && t0 <= t1 {
        return 0.0;
    }
    let to_segment = |p: Point2| {
        let len2 = d.dot(d);
        let s = if len2 > 0.0 {
            ((p - a).dot(d) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = a + d * s - p;
        q.dot(q)
    };
    [
        (fx, fy),
        (fx + 1.0, fy),
        (fx, fy + 1.0),
        (fx + 1.0, fy + 1.0),
    ]
    .into_iter()
    .map(|(x, y)| to_segment(Point2::new(x, y)))
    .chain([cell_distance2(a, fx, fy), cell_distance2(b, fx, fy)])
    .fold(f64::INFINITY, f64::min)
}

fn cell_far_distance2(c: Point2, fx: f64, fy: f64) -> f64 {
    let dx = (c.x - fx).abs().max((fx + 1.0 - c.x).abs());
    let dy = (c.y - fy).abs().max((fy + 1.0 - c.y).abs());
    dx * dx + dy * dy
}

/// `∫ sqrt(R² - x²) dx` from `-R` to `x`, shifted by a constant.
fn half_chord_primitive(x: f64, rad: f64) -> f64 {
    let x = x.clamp(-rad, rad);
    0.5 * (x * (rad * rad - x * x).max(0.0).sqrt() + rad * rad * (x / rad).asin())
}

/// `∫_a^b clamp(y, -s(x), s(x)) dx` with `s(x) = sqrt(R² - x²)` and
/// `-R <= a <= b <= R`.
fn clamped_chord_integral(a: f64, b: f64, rad: f64, y: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let arc = |lo: f64, hi: f64| half_chord_primitive(hi, rad) - half_chord_primitive(lo, rad);
    if y >= rad {
        return arc(a, b);
    }
    if y <= -rad {
        return -arc(a, b);
    }
    let xc = (rad * rad - y * y).sqrt();
    let sign = if y < 0.0 { -1.0 } else { 1.0 };
    let mut total = 0.0;
    let (lo, hi) = (a.max(-xc), b.min(xc));
    if hi > lo {
        total += y * (hi - lo);
    }
    if a < -xc {
        total += sign * arc(a, b.min(-xc));
    }
    if b > xc {
        total += sign * arc(a.max(xc), b);
    }
    total
}

/// Area of the disc of radius `rad` centered at the origin intersected with
/// the rectangle `[x0, x1] × [y0, y1]`.
fn disc_rect_area(rad: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (a, b) = (x0.max(-rad), x1.min(rad));
    if b <= a || y1 <= y0 {
        return 0.0;
    }
    (clamped_chord_integral(a, b, rad, y1) - clamped_chord_integral(a, b, rad, y0)).max(0.0)
}

/// Per-cell obstruction ratios for a fixed camera clearance radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionField {
    width: usize,
    height: usize,
    radius: f64,
    values: Vec<f64>,
}

impl ObstructionField {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.width + ix]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid robot model: {0}")]
pub struct ModelError(String);

/// Geometric model of the robot: a disc footprint and the camera clearance
/// ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    footprint_radius: f64,
    camera_clearance_radius: f64,
}

impl RobotModel {
    pub fn new(footprint_radius: f64, camera_clearance_radius: f64) -> Result<Self, ModelError> {
        if !(footprint_radius.is_finite() && footprint_radius > 0.0) {
            return Err(ModelError(format!(
                "footprint radius must be positive, got {footprint_radius}"
            )));
        }
        if !(camera_clearance_radius.is_finite() && camera_clearance_radius > 0.0) {
            return Err(ModelError(format!(
                "camera clearance radius must be positive, got {camera_clearance_radius}"
            )));
        }
        Ok(Self {
            footprint_radius,
            camera_clearance_radius,
        })
    }

    pub fn footprint_radius(&self) -> f64 {
        self.footprint_radius
    }

    pub fn camera_clearance_radius(&self) -> f64 {
        self.camera_clearance_radius
    }
}
