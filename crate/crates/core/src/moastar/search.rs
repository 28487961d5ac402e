use super::dominance::pareto_filter_tolerant;
use super::{FrontEntry, GoalSpec, ParetoFront, PlanError};
use crate::cost::{CostVector, COST_EPS};
use crate::lattice::{LatticeGraph, LatticeNode};
use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

/// Octile lower bound on the remaining cost. Only the distance component
/// is bounded; obstruction and turns get zero.
pub fn heuristic(node: &LatticeNode, goal: &GoalSpec, delta: f64) -> CostVector {
    let dx = node.ix.abs_diff(goal.ix) as f64 * delta;
    let dy = node.iy.abs_diff(goal.iy) as f64 * delta;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    CostVector::new(0.0, 0, hi - lo + SQRT_2 * lo)
}

struct Label {
    node: usize,
    g: CostVector,
    parent: Option<usize>,
    removed: bool,
}

/// Open-list key: lexicographic on `(f3, f2, f1)`, then label id.
struct OpenEntry {
    f: CostVector,
    label: usize,
}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .distance
            .total_cmp(&other.f.distance)
            .then(self.f.turns.cmp(&other.f.turns))
            .then(self.f.obstruction.total_cmp(&other.f.obstruction))
            .then(self.label.cmp(&other.label))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

pub(super) fn check_endpoints(
    graph: &LatticeGraph,
    start: &LatticeNode,
    goal: &GoalSpec,
) -> Result<(), PlanError> {
    if !graph.contains(start) {
        return Err(PlanError::InvalidStart(*start));
    }
    if !graph.geometry().contains(goal.ix, goal.iy) {
        return Err(PlanError::InvalidGoal(*goal));
    }
    Ok(())
}

/// Multiobjective A* label-setting search for every non-dominated
/// goal-reaching path cost (summed edge costs).
pub fn plan_pareto(
    graph: &LatticeGraph,
    start: &LatticeNode,
    goal: &GoalSpec,
) -> Result<ParetoFront, PlanError> {
    check_endpoints(graph, start, goal)?;
    let delta = graph.delta();

    let mut labels: Vec<Label> = Vec::new();
    let mut at_node: Vec<Vec<usize>> = vec![Vec::new(); graph.id_bound()];
    let mut open = BinaryHeap::new();
    let mut solutions: Vec<usize> = Vec::new();

    let root = graph.node_id(start);
    labels.push(Label {
        node: root,
        g: CostVector::ZERO,
        parent: None,
        removed: false,
    });
    at_node[root].push(0);
    open.push(Reverse(OpenEntry {
        f: heuristic(start, goal, delta),
        label: 0,
    }));

    let solved_by = |solutions: &[usize], labels: &[Label], f: &CostVector| {
        solutions.iter().any(|&s| labels[s].g.covers(f, COST_EPS))
    };

    while let Some(Reverse(entry)) = open.pop() {
        let id = entry.label;
        if labels[id].removed {
            continue;
        }
        if solved_by(&solutions, &labels, &entry.f) {
            continue;
        }
        let node = graph.node_from_id(labels[id].node);
        if goal.is_satisfied_by(&node) {
            let g = labels[id].g;
            solutions.retain(|&s| !g.covers(&labels[s].g, COST_EPS));
            solutions.push(id);
            continue;
        }

        for edge in graph.edges_by_id(labels[id].node) {
            let g = labels[id].g + edge.cost;
            let f = g + heuristic(&edge.to, goal, delta);
            if solved_by(&solutions, &labels, &f) {
                continue;
            }
            let target = graph.node_id(&edge.to);
            if at_node[target]
                .iter()
                .any(|&l| labels[l].g.covers(&g, COST_EPS))
            {
                continue;
            }
            at_node[target].retain(|&l| {
                let dominated = g.covers(&labels[l].g, COST_EPS);
                if dominated {
                    labels[l].removed = true;
                }
                !dominated
            });
            let new_id = labels.len();
            labels.push(Label {
                node: target,
                g,
                parent: Some(id),
                removed: false,
            });
            at_node[target].push(new_id);
            open.push(Reverse(OpenEntry { f, label: new_id }));
        }
    }

    let entries: Vec<FrontEntry> = solutions
        .into_iter()
        .map(|s| {
            let mut path = Vec::new();
            let mut cursor = Some(s);
            while let Some(l) = cursor {
                path.push(graph.node_from_id(labels[l].node));
                cursor = labels[l].parent;
            }
            path.reverse();
            FrontEntry {
                cost: labels[s].g,
                path,
            }
        })
        .collect();
    let entries = pareto_filter_tolerant(entries, |e| e.cost, COST_EPS);
    Ok(ParetoFront::new(*start, *goal, delta, entries))
}
