//! Pareto dominance, multiobjective A* over the lattice, and an exhaustive
//! reference search used to check it.

mod brute;
mod dominance;
mod search;

pub use brute::{brute_force_front, BRUTE_FORCE_NODE_LIMIT};
pub use dominance::{dominates, pareto_filter, pareto_filter_tolerant};
pub use search::{heuristic, plan_pareto};

use crate::cost::{CostVector, COST_EPS};
use crate::lattice::{Heading, LatticeNode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("invalid start {0:?}: not a collision-free lattice node")]
    InvalidStart(LatticeNode),
    #[error("invalid goal {0:?}: outside the lattice")]
    InvalidGoal(GoalSpec),
    #[error("graph has {nodes} nodes, exhaustive search is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
}

/// Goal position on the lattice, optionally with a required heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub ix: usize,
    pub iy: usize,
    #[serde(rename = "heading_deg")]
    pub heading: Option<Heading>,
}

impl GoalSpec {
    pub fn position(ix: usize, iy: usize) -> Self {
        Self {
            ix,
            iy,
            heading: None,
        }
    }

    pub fn pose(ix: usize, iy: usize, heading: Heading) -> Self {
        Self {
            ix,
            iy,
            heading: Some(heading),
        }
    }

    pub fn is_satisfied_by(&self, node: &LatticeNode) -> bool {
        node.ix == self.ix && node.iy == self.iy && self.heading.is_none_or(|h| h == node.heading)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEntry {
    pub cost: CostVector,
    pub path: Vec<LatticeNode>,
}

/// Mutually non-dominated goal-reaching paths, one per distinct cost vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub start: LatticeNode,
    pub goal: GoalSpec,
    pub delta: f64,
    pub entries: Vec<FrontEntry>,
}

impl ParetoFront {
    pub fn new(start: LatticeNode, goal: GoalSpec, delta: f64, entries: Vec<FrontEntry>) -> Self {
        Self {
            start,
            goal,
            delta,
            entries,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn costs(&self) -> Vec<CostVector> {
        self.entries.iter().map(|e| e.cost).collect()
    }

    /// Entries ordered by ascending distance, then turns.
    pub fn sorted_by_distance(&self) -> Vec<&FrontEntry> {
        let mut v: Vec<&FrontEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| {
            a.cost
                .distance
                .total_cmp(&b.cost.distance)
                .then(a.cost.turns.cmp(&b.cost.turns))
                .then(a.cost.obstruction.total_cmp(&b.cost.obstruction))
        });
        v
    }

    /// Whether two fronts hold the same cost vectors under the front
    /// tolerance (exact turns, `COST_EPS` on the real parts).
    pub fn same_costs(&self, other: &ParetoFront) -> bool {
        same_cost_sets(&self.costs(), &other.costs())
    }
}

/// Multiset comparison of cost vectors under the front tolerance.
pub fn same_cost_sets(a: &[CostVector], b: &[CostVector]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(
        |x| match (0..b.len()).find(|&j| !used[j] && x.approx_eq(&b[j], COST_EPS)) {
            Some(j) => {
                used[j] = true;
                true
            }
            None => false,
        },
    )
}
