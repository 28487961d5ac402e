//! Seeded geometric RRT and best-of-N selection by fewest curvature sign
//! changes.

use crate::geom::Point2;
use crate::gridmap::{RobotModel, WorkspaceMap};
use crate::lattice::segment_free;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RrtError {
    #[error("start position is in collision")]
    StartInCollision,
    #[error("goal position is in collision")]
    GoalInCollision,
    #[error("invalid RRT parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RrtParams {
    pub step_size: f64,
    pub goal_bias: f64,
    pub max_iterations: usize,
    pub goal_tolerance: f64,
    pub seed: u64,
}

impl RrtParams {
    /// Step of two map cells, 5% goal bias, 20000 iterations, goal
    /// tolerance equal to the step.
    pub fn defaults_for(map: &WorkspaceMap, seed: u64) -> Self {
        let step_size = 2.0 * map.resolution();
        Self {
            step_size,
            goal_bias: 0.05,
            max_iterations: 20_000,
            goal_tolerance: step_size,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), RrtError> {
        let bad = |field, reason: &str| {
            Err(RrtError::InvalidParams {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return bad("step_size", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return bad("goal_bias", "must lie in [0, 1]");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations", "must be at least 1");
        }
        if !(self.goal_tolerance.is_finite() && self.goal_tolerance >= 0.0) {
            return bad("goal_tolerance", "must be non-negative");
        }
        Ok(())
    }
}

/// A polyline with at least one vertex and no repeated consecutive vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyPath {
    vertices: Vec<Point2>,
}

impl PolyPath {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, RrtError> {
        if vertices.is_empty() {
            return Err(RrtError::InvalidPath("no vertices".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(RrtError::InvalidPath("repeated consecutive vertex".into()));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RrtOutcome {
    Found(PolyPath),
    /// The iteration budget ran out before the goal was connected.
    Exhausted {
        tree_size: usize,
    },
}

struct Tree {
    points: Vec<Point2>,
    parents: Vec<usize>,
}

impl Tree {
    fn nearest(&self, q: Point2) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, p) in self.points.iter().enumerate() {
            let d = (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    fn push(&mut self, p: Point2, parent: usize) -> usize {
        self.points.push(p);
        self.parents.push(parent);
        self.points.len() - 1
    }

    fn branch(&self, mut leaf: usize) -> Vec<Point2> {
        let mut out = vec![self.points[leaf]];
        while leaf != 0 {
            leaf = self.parents[leaf];
            out.push(self.points[leaf]);
        }
        out.reverse();
        out
    }
}

/// Grows an RRT from `start` with straight-line steering until a node within
/// `goal_tolerance` can be joined to `goal`. The returned path ends exactly
/// at `goal`.
pub fn rrt_plan(
    map: &WorkspaceMap,
    model: &RobotModel,
    start: Point2,
    goal: Point2,
    params: &RrtParams,
) -> Result<RrtOutcome, RrtError> {
    params.validate()?;
    let rho = model.footprint_radius();
    if !map.footprint_free(start, rho) {
        return Err(RrtError::StartInCollision);
    }
    if !map.footprint_free(goal, rho) {
        return Err(RrtError::GoalInCollision);
    }
    if start == goal {
        return Ok(RrtOutcome::Found(PolyPath::new(vec![start])?));
    }

    let mut tree = Tree {
        points: vec![start],
        parents: vec![0],
    };
    let reaches_goal = |tree: &Tree, i: usize| {
        let p = tree.points[i];
        p.distance(goal) <= params.goal_tolerance && segment_free(map, p, goal, rho)
    };
    let finish = |tree: &Tree, i: usize| {
        let mut vertices = tree.branch(i);
        if *vertices.last().expect("branch is never empty") != goal {
            vertices.push(goal);
        }
        PolyPath::new(vertices).map(RrtOutcome::Found)
    };
    if reaches_goal(&tree, 0) {
        return finish(&tree, 0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (lo, hi) = (map.origin(), map.extent());
    for _ in 0..params.max_iterations {
        let sample = if rng.gen::<f64>() < params.goal_bias {
            goal
        } else {
            Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y))
        };
        let near = tree.nearest(sample);
        let from = tree.points[near];
        let dist = from.distance(sample);
        if dist == 0.0 {
            continue;
        }
        let new = if dist <= params.step_size {
            sample
        } else {
            from.lerp(sample, params.step_size / dist)
        };
        if new == from || !segment_free(map, from, new, rho) {
            continue;
        }
        let id = tree.push(new, near);
        if reaches_goal(&tree, id) {
            return finish(&tree, id);
        }
    }
    Ok(RrtOutcome::Exhausted {
        tree_size: tree.points.len(),
    })
}

/// Number of sign alternations of the turning direction along the path.
/// Collinear vertices carry no sign and do not reset the previous one.
pub fn curvature_sign_changes(path: &PolyPath) -> Result<usize, RrtError> {
    let v = path.vertices();
    if v.len() < 2 {
        return Err(RrtError::InvalidPath(
            "curvature needs at least two vertices".into(),
        ));
    }
    let mut last_sign = 0.0;
    let mut changes = 0;
    for w in v.windows(3) {
        let (d1, d2) = (w[1] - w[0], w[2] - w[1]);
        let cross = d1.cross(d2) / (d1.norm() * d2.norm());
        if cross.abs() <= 1e-9 {
            continue;
        }
        let sign = cross.signum();
        if last_sign != 0.0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    Ok(changes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_changes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub path: PolyPath,
    pub seed: u64,
    pub sign_changes: usize,
    pub length: f64,
}

/// Result of `n` seeded reruns. `selected` is `None` when every run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct BestOfN {
    pub selected: Option<Selection>,
    pub runs: Vec<RunSummary>,
}

impl BestOfN {
    pub fn successes(&self) -> usize {
        self.runs.iter().filter(|r| r.success).count()
    }
}

/// Runs seeds `params.seed .. params.seed + n` and keeps the path with the
/// fewest curvature sign changes, then the shortest, then the lowest seed.
pub fn best_of_n(
    map: &WorkspaceMap,
    model: &RobotModel,
    start: Point2,
    goal: Point2,
    params: &RrtParams,
    n: usize,
) -> Result<BestOfN, RrtError> {
    if n == 0 {
        return Err(RrtError::InvalidParams {
            field: "n",
            reason: "must be at least 1".into(),
        });
    }
    params.validate()?;
    let outcomes: Vec<(u64, RrtOutcome)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = params.seed.wrapping_add(i);
            let run = RrtParams { seed, ..*params };
            rrt_plan(map, model, start, goal, &run).map(|o| (seed, o))
        })
        .collect::<Result<_, _>>()?;

    let mut runs = Vec::with_capacity(n);
    let mut selected: Option<Selection> = None;
    for (seed, outcome) in outcomes {
        match outcome {
            RrtOutcome::Found(path) => {
                let sign_changes = if path.vertices().len() >= 2 {
                    curvature_sign_changes(&path)?
                } else {
                    0
                };
                let length = path.length();
                runs.push(RunSummary {
                    seed,
                    success: true,
                    sign_changes: Some(sign_changes),
                    length: Some(length),
                });
                let better = selected
                    .as_ref()
                    .is_none_or(|s| (sign_changes, length) < (s.sign_changes, s.length));
                if better {
                    selected = Some(Selection {
                        path,
                        seed,
                        sign_changes,
                        length,
                    });
                }
            }
            RrtOutcome::Exhausted { .. } => runs.push(RunSummary {
                seed,
                success: false,
                sign_changes: None,
                length: None,
            }),
        }
    }
    Ok(BestOfN { selected, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> PolyPath {
        PolyPath::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    fn open_map() -> WorkspaceMap {
        WorkspaceMap::new(20, 20, 0.5, Point2::default(), vec![false; 400]).unwrap()
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(
            curvature_sign_changes(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])).unwrap(),
            0
        );
        let zigzag = pts(&[
            (0.0, 0.0),
            (1.0, 1.0),
            (2.0, 0.0),
            (3.0, 1.0),
            (4.0, 0.0),
            (5.0, 1.0),
        ]);
        assert_eq!(curvature_sign_changes(&zigzag).unwrap(), 3);
        let c_shape = pts(&[(2.0, 0.0), (0.0, 0.0), (0.0, 2.0), (2.0, 2.0)]);
        assert_eq!(curvature_sign_changes(&c_shape).unwrap(), 0);
        // collinear vertex between two left turns keeps the sign
        let left = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0), (0.0, 2.0)]);
        assert_eq!(curvature_sign_changes(&left).unwrap(), 0);
        assert!(curvature_sign_changes(&pts(&[(0.0, 0.0)])).is_err());
    }

    #[test]
    fn path_validation() {
        assert!(PolyPath::new(vec![]).is_err());
        assert!(PolyPath::new(vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)]).is_err());
    }

    #[test]
    fn trivial_and_open_plans() {
        let map = open_map();
        let model = RobotModel::new(0.3, 1.0).unwrap();
        let p = Point2::new(2.0, 2.0);
        let params = RrtParams::defaults_for(&map, 7);
        assert_eq!(
            rrt_plan(&map, &model, p, p, &params).unwrap(),
            RrtOutcome::Found(PolyPath::new(vec![p]).unwrap())
        );
        let goal = Point2::new(8.0, 7.0);
        let RrtOutcome::Found(path) = rrt_plan(&map, &model, p, goal, &params).unwrap() else {
            panic!("open map should be solvable");
        };
        assert!(path.length() >= p.distance(goal) - 1e-12);
        assert_eq!(*path.vertices().last().unwrap(), goal);
        assert_eq!(
            rrt_plan(&map, &model, p, goal, &params).unwrap(),
            RrtOutcome::Found(path)
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let map = WorkspaceMap::from_rows(&["#...", "...."], 1.0, Point2::default()).unwrap();
        let model = RobotModel::new(0.3, 1.0).unwrap();
        let params = RrtParams::defaults_for(&map, 0);
        let free = Point2::new(2.5, 0.5);
        assert_eq!(
            rrt_plan(&map, &model, Point2::new(0.5, 1.5), free, &params),
            Err(RrtError::StartInCollision)
        );
        assert_eq!(
            rrt_plan(&map, &model, free, Point2::new(0.5, 1.5), &params),
            Err(RrtError::GoalInCollision)
        );
        let bad = RrtParams {
            goal_bias: 1.5,
            ..params
        };
        assert!(matches!(
            rrt_plan(&map, &model, free, free, &bad),
            Err(RrtError::InvalidParams {
                field: "goal_bias",
                ..
            })
        ));
        assert!(best_of_n(&map, &model, free, free, &params, 0).is_err());
    }

    #[test]
    fn best_of_one_is_plain_run() {
        let map = open_map();
        let model = RobotModel::new(0.3, 1.0).unwrap();
        let params = RrtParams::defaults_for(&map, 42);
        let (s, g) = (Point2::new(1.0, 1.0), Point2::new(9.0, 9.0));
        let best = best_of_n(&map, &model, s, g, &params, 1).unwrap();
        let RrtOutcome::Found(path) = rrt_plan(&map, &model, s, g, &params).unwrap() else {
            panic!()
        };
        assert_eq!(best.selected.unwrap().path, path);
    }
}
