//! Constant-speed execution of piecewise-linear paths (straight moves with
//! the heading tangent, rotations in place between them) and evaluation of
//! the obstruction / turns / distance criteria on sampled trajectories.

use crate::cost::{CostVector, CriterionClass};
use crate::geom::{normalize_degrees, wrapped_difference_degrees, Point2};
use crate::gridmap::WorkspaceMap;
use crate::lattice::{classify, EdgeKind, LatticeGraph, LatticeNode};
use crate::rrt::PolyPath;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default translational speed, m/s.
pub const DEFAULT_SPEED: f64 = 1.0;
/// Default rotational speed, deg/s.
pub const DEFAULT_OMEGA_DEG: f64 = 90.0;
/// Default sampling tick, s.
pub const DEFAULT_DT: f64 = 0.05;

/// Heading changes below this (degrees) are not rotations.
const HEADING_EPS: f64 = 1e-9;
/// Displacements below this (meters) are treated as standing still.
const POSITION_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("empty path")]
    EmptyPath,
    #[error("consecutive path nodes {0:?} -> {1:?} are not joined by a lattice edge")]
    Broken(LatticeNode, LatticeNode),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> TrajectoryError {
    TrajectoryError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationDirection {
    #[serde(rename = "ccw")]
    CounterClockwise,
    #[serde(rename = "cw")]
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Segment {
    Rotate {
        at: Point2,
        from_deg: f64,
        to_deg: f64,
        direction: RotationDirection,
    },
    Translate {
        from: Point2,
        to: Point2,
        heading_deg: f64,
    },
}

impl Segment {
    /// Rotation for `from -> to` along the shorter arc, ties counterclockwise.
    pub fn rotation(at: Point2, from_deg: f64, to_deg: f64) -> Segment {
        let diff = wrapped_difference_degrees(from_deg, to_deg);
        Segment::Rotate {
            at,
            from_deg: normalize_degrees(from_deg),
            to_deg: normalize_degrees(to_deg),
            direction: if diff >= 0.0 {
                RotationDirection::CounterClockwise
            } else {
                RotationDirection::Clockwise
            },
        }
    }

    /// Absolute rotation angle in degrees (zero for translations).
    pub fn arc_degrees(&self) -> f64 {
        match *self {
            Segment::Rotate {
                from_deg,
                to_deg,
                direction,
                ..
            } => match direction {
                RotationDirection::CounterClockwise => (to_deg - from_deg).rem_euclid(360.0),
                RotationDirection::Clockwise => (from_deg - to_deg).rem_euclid(360.0),
            },
            Segment::Translate { .. } => 0.0,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Translate { from, to, .. } => from.distance(to),
            Segment::Rotate { .. } => 0.0,
        }
    }

    pub fn duration(&self, v: f64, omega_deg: f64) -> f64 {
        match self {
            Segment::Translate { .. } => self.length() / v,
            Segment::Rotate { .. } => self.arc_degrees() / omega_deg,
        }
    }

    /// Pose `tau` seconds into the segment.
    fn pose_at(&self, tau: f64, v: f64, omega_deg: f64) -> (Point2, f64) {
        match *self {
            Segment::Translate {
                from,
                to,
                heading_deg,
            } => {
                let len = from.distance(to);
                let s = if len > 0.0 {
                    (tau * v / len).clamp(0.0, 1.0)
                } else {
                    1.0
                };
                (from.lerp(to, s), heading_deg)
            }
            Segment::Rotate {
                at,
                from_deg,
                direction,
                ..
            } => {
                let swept = (tau * omega_deg).min(self.arc_degrees());
                let heading = match direction {
                    RotationDirection::CounterClockwise => from_deg + swept,
                    RotationDirection::Clockwise => from_deg - swept,
                };
                (at, normalize_degrees(heading))
            }
        }
    }

    fn end_pose(&self) -> (Point2, f64) {
        match *self {
            Segment::Translate {
                to, heading_deg, ..
            } => (to, heading_deg),
            Segment::Rotate { at, to_deg, .. } => (at, to_deg),
        }
    }
}

/// A chain of rotations in place and straight moves from a start pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPath {
    pub start: Point2,
    pub start_heading_deg: f64,
    pub segments: Vec<Segment>,
}

impl SegmentPath {
    /// Type-A edges become rotations; runs of Type-B edges with one heading
    /// merge into a single translation.
    pub fn from_lattice(
        graph: &LatticeGraph,
        path: &[LatticeNode],
    ) -> Result<Self, TrajectoryError> {
        let first = path.first().ok_or(TrajectoryError::EmptyPath)?;
        let mut segments: Vec<Segment> = Vec::new();
        for pair in path.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let kind = classify(a, b).ok_or(TrajectoryError::Broken(*a, *b))?;
            let (pa, pb) = (graph.node_position(a), graph.node_position(b));
            match kind {
                EdgeKind::Rotation => segments.push(Segment::rotation(
                    pa,
                    a.heading.degrees(),
                    b.heading.degrees(),
                )),
                EdgeKind::Straight => {
                    let heading_deg = a.heading.degrees();
                    match segments.last_mut() {
                        Some(Segment::Translate {
                            to, heading_deg: h, ..
                        }) if *h == heading_deg => {
                            *to = pb;
                        }
                        _ => segments.push(Segment::Translate {
                            from: pa,
                            to: pb,
                            heading_deg,
                        }),
                    }
                }
            }
        }
        Ok(Self {
            start: graph.node_position(first),
            start_heading_deg: first.heading.degrees(),
            segments,
        })
    }

    /// Heading follows each segment's direction; a rotation is inserted at
    /// every vertex where the direction changes. The start heading is the
    /// first segment's direction.
    pub fn from_polyline(path: &PolyPath) -> Result<Self, TrajectoryError> {
        let vertices = path.vertices();
        let first = *vertices.first().ok_or(TrajectoryError::EmptyPath)?;
        let direction_deg =
            |a: Point2, b: Point2| normalize_degrees((b.y - a.y).atan2(b.x - a.x).to_degrees());
        let start_heading_deg = if vertices.len() > 1 {
            direction_deg(vertices[0], vertices[1])
        } else {
            0.0
        };
        let mut segments: Vec<Segment> = Vec::new();
        let mut heading = start_heading_deg;
        for (i, pair) in vertices.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            if i > 0 && turns_at(vertices[i - 1], a, b) {
                let next = direction_deg(a, b);
                segments.push(Segment::rotation(a, heading, next));
                heading = next;
            }
            match segments.last_mut() {
                Some(Segment::Translate { to, .. }) => *to = b,
                _ => segments.push(Segment::Translate {
                    from: a,
                    to: b,
                    heading_deg: heading,
                }),
            }
        }
        Ok(Self {
            start: first,
            start_heading_deg,
            segments,
        })
    }

    pub fn rotation_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| matches!(s, Segment::Rotate { .. }))
            .count()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn duration(&self, v: f64, omega_deg: f64) -> f64 {
        self.segments.iter().map(|s| s.duration(v, omega_deg)).sum()
    }

    /// Rotation poses (position, start heading) in order.
    pub fn rotation_points(&self) -> Vec<Point2> {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Rotate { at, .. } => Some(*at),
                _ => None,
            })
            .collect()
    }

    /// Samples the path at constant speeds every `dt` seconds, plus a final
    /// sample at the end time when it is not on the grid.
    pub fn to_timed(
        &self,
        v: f64,
        omega_deg: f64,
        dt: f64,
    ) -> Result<TimedTrajectory, TrajectoryError> {
        for (field, value) in [("v", v), ("omega_deg", omega_deg), ("dt", dt)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be positive, got {value}")));
            }
        }
        let durations: Vec<f64> = self
            .segments
            .iter()
            .map(|s| s.duration(v, omega_deg))
            .collect();
        let total: f64 = durations.iter().sum();

        let pose = |t: f64| -> (Point2, f64) {
            let mut elapsed = 0.0;
            let mut current = (self.start, normalize_degrees(self.start_heading_deg));
            for (seg, &d) in self.segments.iter().zip(&durations) {
                if t <= elapsed + d {
                    return seg.pose_at(t - elapsed, v, omega_deg);
                }
                elapsed += d;
                current = seg.end_pose();
            }
            (current.0, normalize_degrees(current.1))
        };

        // tolerance for deciding that the end time falls on the tick grid
        let tol = 1e-9 * dt;
        let mut times: Vec<f64> = Vec::new();
        let mut k = 0usize;
        loop {
            let t = k as f64 * dt;
            if t > total - tol {
                break;
            }
            times.push(t);
            k += 1;
        }
        times.push(total);

        let samples = times
            .into_iter()
            .map(|t| {
                let (p, heading) = pose(t);
                Sample {
                    t,
                    x: p.x,
                    y: p.y,
                    theta_deg: heading,
                }
            })
            .collect();
        Ok(TimedTrajectory {
            v,
            omega_deg,
            dt,
            samples,
        })
    }
}

/// Whether the direction changes at `b` on `a -> b -> c`.
fn turns_at(a: Point2, b: Point2, c: Point2) -> bool {
    let (d1, d2) = (b - a, c - b);
    let (n1, n2) = (d1.norm(), d2.norm());
    if n1 == 0.0 || n2 == 0.0 {
        return false;
    }
    let cross = d1.cross(d2) / (n1 * n2);
    cross.abs() > 1e-9 || d1.dot(d2) < 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta_deg: f64,
}

impl Sample {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Uniformly sampled constant-speed trajectory. This is also the on-disk
/// trajectory format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedTrajectory {
    pub v: f64,
    pub omega_deg: f64,
    pub dt: f64,
    pub samples: Vec<Sample>,
}

impl TimedTrajectory {
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Checks the sampling invariants of a trajectory read from outside.
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        for (field, value) in [
            ("v", self.v),
            ("omega_deg", self.omega_deg),
            ("dt", self.dt),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be positive, got {value}")));
            }
        }
        let first = self
            .samples
            .first()
            .ok_or_else(|| invalid("samples", "must contain at least one sample"))?;
        if first.t != 0.0 {
            return Err(invalid("samples", "first sample must be at t = 0"));
        }
        for (i, s) in self.samples.iter().enumerate() {
            if ![s.t, s.x, s.y, s.theta_deg].iter().all(|v| v.is_finite()) {
                return Err(invalid(
                    "samples",
                    format!("sample {i} has a non-finite value"),
                ));
            }
        }
        if let Some(i) = self.samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(invalid(
                "samples",
                format!("t is not strictly increasing at sample {}", i + 1),
            ));
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.samples.iter().map(Sample::position).collect()
    }

    /// Positions where the trajectory rotates in place, one per rotation.
    pub fn rotation_points(&self) -> Vec<Point2> {
        motion_profile(self).rotations
    }
}

/// Corner lengths below this (meters) count as zero.
const LENGTH_EPS: f64 = 1e-9;
/// Slack (seconds) when checking that a corner explains an interval.
const TIMING_EPS: f64 = 1e-9;

/// Motion reconstructed from the samples under the constant-speed model.
struct MotionProfile {
    /// Position of every rotation in place, in order.
    rotations: Vec<Point2>,
    distance: f64,
    /// Instants strictly between samples where a translation stops or
    /// starts, with the position there.
    breakpoints: Vec<(f64, Point2)>,
}

/// Rotation position `c` and the straight lengths before and after it, for
/// an interval that both moves and turns and is explained by one rotation:
/// `p0 + a u(θ0) = c = p1 - b u(θ1)` with `(a + b) / v + |Δθ| / ω = Δt`.
fn single_corner(s0: &Sample, s1: &Sample, v: f64, omega_deg: f64) -> Option<(Point2, f64, f64)> {
    let unit = |deg: f64| Point2::new(deg.to_radians().cos(), deg.to_radians().sin());
    let (u0, u1) = (unit(s0.theta_deg), unit(s1.theta_deg));
    let d = s1.position() - s0.position();
    let turn = wrapped_difference_degrees(s0.theta_deg, s1.theta_deg).abs();
    let dt = s1.t - s0.t;
    let det = u0.cross(u1);
    let (a, b) = if det.abs() > 1e-12 {
        (d.cross(u1) / det, u0.cross(d) / det)
    } else {
        // reversal: both legs lie on one line
        let along = d.dot(u0);
        if (d - u0 * along).norm() > LENGTH_EPS {
            return None;
        }
        let legs = v * (dt - turn / omega_deg);
        ((legs + along) / 2.0, (legs - along) / 2.0)
    };
    if a < -LENGTH_EPS || b < -LENGTH_EPS {
        return None;
    }
    let (a, b) = (a.max(0.0), b.max(0.0));
    if ((a + b) / v + turn / omega_deg - dt).abs() > TIMING_EPS * (1.0 + dt) {
        return None;
    }
    Some((s0.position() + u0 * a, a, b))
}

/// Reconstructs rotations, travelled distance and rotation start/stop
/// instants from the samples. Each interval is a translation, a rotation in
/// place, or both around one corner. An interval that cannot be explained
/// by at most one rotation counts its chord and at most one rotation.
fn motion_profile(timed: &TimedTrajectory) -> MotionProfile {
    let mut out = MotionProfile {
        rotations: Vec::new(),
        distance: 0.0,
        breakpoints: Vec::new(),
    };
    let mut rotating = false;
    for w in timed.samples.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        let chord = s0.position().distance(s1.position());
        let moving = chord >= POSITION_EPS;
        let turning = wrapped_difference_degrees(s0.theta_deg, s1.theta_deg).abs() > HEADING_EPS;
        match (turning, moving) {
            (false, _) => {
                out.distance += if moving { chord } else { 0.0 };
                rotating = false;
            }
            (true, false) => {
                if !rotating {
                    out.rotations.push(s0.position());
                }
                rotating = true;
            }
            (true, true) => match single_corner(s0, s1, timed.v, timed.omega_deg) {
                Some((corner, lead, trail)) => {
                    if !rotating || lead > LENGTH_EPS {
                        out.rotations.push(corner);
                    }
                    if lead > LENGTH_EPS {
                        out.breakpoints.push((s0.t + lead / timed.v, corner));
                    }
                    if trail > LENGTH_EPS {
                        out.breakpoints.push((s1.t - trail / timed.v, corner));
                    }
                    out.distance += lead + trail;
                    rotating = trail <= LENGTH_EPS;
                }
                None => {
                    if !rotating {
                        out.rotations.push(s0.position());
                    }
                    out.distance += chord;
                    rotating = true;
                }
            },
        }
    }
    out.breakpoints
        .retain(|&(t, _)| timed.samples.iter().all(|s| s.t != t));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionClasses {
    #[serde(rename = "V")]
    pub obstruction: CriterionClass,
    #[serde(rename = "N")]
    pub turns: CriterionClass,
    #[serde(rename = "D")]
    pub distance: CriterionClass,
}

impl Default for CriterionClasses {
    fn default() -> Self {
        let [obstruction, turns, distance] = CostVector::CLASSES;
        Self {
            obstruction,
            turns,
            distance,
        }
    }
}

/// Evaluated cost of a trajectory: `(V, N, D)` plus duration and, for
/// lattice paths, the additive obstruction the search optimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Time-averaged obstruction ratio.
    #[serde(rename = "V")]
    pub obstruction: f64,
    /// Number of rotations in place.
    #[serde(rename = "N")]
    pub turns: u32,
    /// Traveled distance, meters.
    #[serde(rename = "D")]
    pub distance: f64,
    /// Duration, seconds.
    #[serde(rename = "T")]
    pub duration: f64,
    /// Sum of edge obstruction weights (lattice paths only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction_sum: Option<f64>,
    /// Edge-averaged obstruction, `obstruction_sum / edges` (lattice paths only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction_edge_mean: Option<f64>,
    #[serde(default)]
    pub classes: CriterionClasses,
}

impl CostReport {
    /// Attaches the search-time obstruction figures of a lattice path.
    pub fn with_search_cost(mut self, cost: &CostVector, edges: usize) -> Self {
        self.obstruction_sum = Some(cost.obstruction);
        self.obstruction_edge_mean = Some(if edges == 0 {
            0.0
        } else {
            cost.obstruction / edges as f64
        });
        self
    }

    /// Whether the evaluated `(V, N, D, T)` agree within `eps`.
    pub fn matches(&self, other: &CostReport, eps: f64) -> bool {
        self.turns == other.turns
            && (self.obstruction - other.obstruction).abs() <= eps
            && (self.distance - other.distance).abs() <= eps
            && (self.duration - other.duration).abs() <= eps
    }
}

/// Evaluates `(V, N, D)` on a sampled trajectory. `V` is the trapezoidal
/// time average of the obstruction ratio, `D` the travelled distance and
/// `N` the number of rotations in place.
///
/// Rotation corners between two samples are recovered from the sample
/// headings and `v`, `omega_deg`. Their start and stop instants join the
/// samples as quadrature nodes: φ(p(t)) has a slope discontinuity there,
/// and a node keeps the trapezoidal error smooth in `dt`.
pub fn eval_costs(timed: &TimedTrajectory, map: &WorkspaceMap, r: f64) -> CostReport {
    let samples = &timed.samples;
    let duration = timed.duration();
    let profile = motion_profile(timed);

    let obstruction = if duration > 0.0 {
        let mut knots: Vec<(f64, Point2)> = samples.iter().map(|s| (s.t, s.position())).collect();
        knots.extend(profile.breakpoints.iter().copied());
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let values: Vec<f64> = knots
            .par_iter()
            .map(|&(_, p)| map.obstruction_ratio(p, r))
            .collect();
        let integral: f64 = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, f)| (k[1].0 - k[0].0) * (f[0] + f[1]) / 2.0)
            .sum();
        (integral / duration).clamp(0.0, 1.0)
    } else {
        samples
            .first()
            .map_or(0.0, |s| map.obstruction_ratio(s.position(), r))
    };

    CostReport {
        obstruction,
        turns: profile.rotations.len() as u32,
        distance: profile.distance,
        duration,
        obstruction_sum: None,
        obstruction_edge_mean: None,
        classes: CriterionClasses::default(),
    }
}
