//! Comfort-aware multiobjective motion planning for a differential-drive
//! robot carrying a 360° camera.
//!
//! The crate builds an SE(2) lattice over an occupancy grid, computes the
//! Pareto front of piecewise-linear paths under three criteria (camera
//! obstruction, rotations in place, traveled distance), time-parameterizes
//! paths at constant speed and evaluates any sampled trajectory against the
//! same criteria. A seeded RRT provides a baseline.

pub mod cost;
pub mod fixtures;
pub mod geom;
pub mod gridmap;
pub mod lattice;
pub mod moastar;
pub mod rrt;
pub mod trajectory;

pub use cost::{CostVector, CriterionClass, COST_EPS};
pub use geom::Point2;
pub use gridmap::{MapError, ObstructionField, RobotModel, WorkspaceMap};
pub use lattice::{EdgeKind, Heading, LatticeEdge, LatticeError, LatticeGraph, LatticeNode};
pub use moastar::{
    brute_force_front, dominates, pareto_filter, plan_pareto, FrontEntry, GoalSpec, ParetoFront,
    PlanError,
};
pub use rrt::{
    best_of_n, curvature_sign_changes, rrt_plan, BestOfN, PolyPath, RrtOutcome, RrtParams,
};
pub use trajectory::{eval_costs, CostReport, SegmentPath, TimedTrajectory};
