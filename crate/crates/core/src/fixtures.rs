//! Bundled fixtures: a museum-style floor plan (a start room and a goal room
//! joined by an open hall across the top and a narrow, jogging passage
//! through a central block) and small random planning problems.

use crate::geom::Point2;
use crate::gridmap::{RobotModel, WorkspaceMap};
use crate::lattice::{Heading, LatticeNode};
use crate::moastar::GoalSpec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MUSEUM_MAP_JSON: &str = include_str!("../fixtures/museum.json");

/// Lattice step for the museum map (two map cells).
pub const MUSEUM_DELTA: f64 = 1.0;
/// Robot footprint radius, meters.
pub const MUSEUM_RHO: f64 = 0.3;
/// Camera clearance radius, meters (two lattice steps).
pub const MUSEUM_R: f64 = 2.0;

pub fn museum_map() -> WorkspaceMap {
    WorkspaceMap::from_json(MUSEUM_MAP_JSON).expect("bundled museum map is valid")
}

pub fn museum_model() -> RobotModel {
    RobotModel::new(MUSEUM_RHO, MUSEUM_R).expect("bundled model is valid")
}

/// Start pose of the reference query: start room, facing +x.
pub fn museum_start() -> LatticeNode {
    LatticeNode::new(2, 3, Heading::EAST)
}

/// Goal of the reference query: goal room, any heading.
pub fn museum_goal() -> GoalSpec {
    GoalSpec::position(17, 3)
}

/// World positions of the reference start and goal (lattice position
/// centers).
pub fn museum_world_endpoints() -> (Point2, Point2) {
    // lattice (ix, iy) sits at the center of map cell (2 ix, 2 iy)
    let at = |ix: usize, iy: usize| Point2::new(ix as f64 + 0.25, iy as f64 + 0.25);
    (at(2, 3), at(17, 3))
}

/// A spread of start/goal queries over the museum map.
pub fn museum_queries() -> Vec<(LatticeNode, GoalSpec)> {
    let e = Heading::EAST;
    let n = Heading::NORTH;
    let w = Heading::from_index(4).unwrap();
    let ne = Heading::from_index(1).unwrap();
    vec![
        (LatticeNode::new(2, 3, e), GoalSpec::position(17, 3)),
        (LatticeNode::new(2, 3, e), GoalSpec::pose(17, 3, e)),
        (LatticeNode::new(3, 6, n), GoalSpec::position(16, 6)),
        (LatticeNode::new(1, 1, e), GoalSpec::position(18, 1)),
        (LatticeNode::new(2, 12, e), GoalSpec::position(17, 12)),
        (LatticeNode::new(5, 3, e), GoalSpec::position(14, 3)),
        (LatticeNode::new(17, 3, w), GoalSpec::position(2, 3)),
        (LatticeNode::new(4, 8, ne), GoalSpec::position(15, 9)),
        (LatticeNode::new(2, 2, e), GoalSpec::position(10, 14)),
        (LatticeNode::new(10, 14, e), GoalSpec::position(18, 2)),
        (LatticeNode::new(1, 1, n), GoalSpec::position(19, 16)),
        (LatticeNode::new(3, 4, e), GoalSpec::pose(16, 5, n)),
        (LatticeNode::new(5, 5, e), GoalSpec::position(15, 5)),
        (LatticeNode::new(1, 8, e), GoalSpec::position(19, 8)),
        (LatticeNode::new(8, 3, ne), GoalSpec::position(13, 3)),
        (LatticeNode::new(2, 15, e), GoalSpec::position(17, 15)),
        (LatticeNode::new(16, 1, n), GoalSpec::position(3, 1)),
        (LatticeNode::new(4, 2, e), GoalSpec::position(4, 13)),
        (LatticeNode::new(14, 3, w), GoalSpec::position(5, 3)),
        (LatticeNode::new(2, 5, e), GoalSpec::pose(18, 4, e)),
    ]
}

/// A small planning problem for checking the search against brute force.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub map: WorkspaceMap,
    pub model: RobotModel,
    pub delta: f64,
    pub start: LatticeNode,
    pub goal: GoalSpec,
}

/// Random map of 3..=5 by 3..=5 unit cells with 0-30% obstacle density,
/// lattice step of one cell, and distinct start and goal positions drawn
/// from the footprint-free cells, the goal biased away from the start. The
/// goal carries a heading half of the time. Returns `None` when no distinct
/// goal cell was drawn.
pub fn random_instance(seed: u64) -> Option<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = rng.gen_range(3..=5);
    let height = rng.gen_range(3..=5);
    let density = rng.gen_range(0.0..0.3);
    let occupancy: Vec<bool> = (0..width * height).map(|_| rng.gen_bool(density)).collect();
    let map = WorkspaceMap::new(width, height, 1.0, Point2::default(), occupancy).ok()?;
    let model = RobotModel::new(rng.gen_range(0.1..=0.45), rng.gen_range(1.0..=2.5)).ok()?;

    let free: Vec<(usize, usize)> = (0..height)
        .flat_map(|iy| (0..width).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| map.footprint_free(map.cell_center(ix, iy), model.footprint_radius()))
        .collect();
    let &(sx, sy) = free.choose(&mut rng)?;
    // farthest of a few candidates, so that routes have room to differ
    let (gx, gy) = (0..3)
        .filter_map(|_| free.choose(&mut rng).copied())
        .filter(|&c| c != (sx, sy))
        .max_by_key(|&(x, y)| x.abs_diff(sx).max(y.abs_diff(sy)))?;
    let start = LatticeNode::new(sx, sy, Heading::ALL[rng.gen_range(0..8)]);
    let goal = if rng.gen_bool(0.5) {
        GoalSpec::pose(gx, gy, Heading::ALL[rng.gen_range(0..8)])
    } else {
        GoalSpec::position(gx, gy)
    };
    Some(RandomInstance {
        map,
        model,
        delta: 1.0,
        start,
        goal,
    })
}
