use super::dominance::pareto_filter_tolerant;
use super::search::check_endpoints;
use super::{FrontEntry, GoalSpec, ParetoFront, PlanError};
use crate::cost::{CostVector, COST_EPS};
use crate::lattice::{EdgeKind, LatticeEdge, LatticeGraph, LatticeNode};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Largest graph (in nodes) the exhaustive search accepts.
pub const BRUTE_FORCE_NODE_LIMIT: usize = 512;

/// Exhaustive enumeration of goal-reaching paths that never revisit a
/// lattice state, reduced to its Pareto front.
///
/// Three cuts keep this tractable without affecting the front:
/// * a partial path is abandoned once its cost plus a per-criterion lower
///   bound (independent single-criterion Dijkstra runs backwards from the
///   goal) is covered by a goal cost already found;
/// * two rotations in a row are never taken, since a single rotation to the
///   final heading costs strictly less;
/// * a position is never entered twice: the loop between two visits can be
///   replaced by one rotation in place, which costs no more obstruction or
///   turns and strictly less distance.
pub fn brute_force_front(
    graph: &LatticeGraph,
    start: &LatticeNode,
    goal: &GoalSpec,
) -> Result<ParetoFront, PlanError> {
    let nodes = graph.node_count();
    if nodes > BRUTE_FORCE_NODE_LIMIT {
        return Err(PlanError::TooLarge {
            nodes,
            limit: BRUTE_FORCE_NODE_LIMIT,
        });
    }
    check_endpoints(graph, start, goal)?;

    let bounds = LowerBounds::compute(graph, goal);
    let mut search = Enumeration {
        graph,
        goal,
        bounds,
        visited: vec![false; graph.geometry().nx * graph.geometry().ny],
        path: vec![*start],
        found: Vec::new(),
    };
    let root = search.cell(start);
    search.visited[root] = true;
    search.descend(graph.node_id(start), CostVector::ZERO, None);

    let entries = pareto_filter_tolerant(search.found, |e| e.cost, COST_EPS);
    Ok(ParetoFront::new(*start, *goal, graph.delta(), entries))
}

struct Enumeration<'a> {
    graph: &'a LatticeGraph,
    goal: &'a GoalSpec,
    bounds: LowerBounds,
    visited: Vec<bool>,
    path: Vec<LatticeNode>,
    found: Vec<FrontEntry>,
}

impl Enumeration<'_> {
    fn cell(&self, node: &LatticeNode) -> usize {
        node.iy * self.graph.geometry().nx + node.ix
    }

    fn descend(&mut self, id: usize, g: CostVector, last: Option<EdgeKind>) {
        let node = self.graph.node_from_id(id);
        if self.goal.is_satisfied_by(&node) {
            self.found.push(FrontEntry {
                cost: g,
                path: self.path.clone(),
            });
            return;
        }
        // most promising first, so that solutions found early prune the rest
        let mut children: Vec<(LatticeEdge, usize, CostVector)> = Vec::new();
        for edge in self.graph.edges_by_id(id) {
            let moves = edge.kind == EdgeKind::Straight;
            if !moves && last == Some(EdgeKind::Rotation) {
                continue;
            }
            if moves && self.visited[self.cell(&edge.to)] {
                continue;
            }
            let next = self.graph.node_id(&edge.to);
            if let Some(bound) = self.bounds.at(next) {
                children.push((*edge, next, g + edge.cost + bound));
            }
        }
        children.sort_by(|a, b| {
            (a.2.distance, a.2.turns)
                .partial_cmp(&(b.2.distance, b.2.turns))
                .expect("finite bounds")
        });
        for (edge, next, optimistic) in children {
            if self
                .found
                .iter()
                .any(|f| f.cost.covers(&optimistic, COST_EPS))
            {
                continue;
            }
            let moves = edge.kind == EdgeKind::Straight;
            let cell = self.cell(&edge.to);
            if moves {
                self.visited[cell] = true;
            }
            self.path.push(edge.to);
            self.descend(next, g + edge.cost, Some(edge.kind));
            self.path.pop();
            if moves {
                self.visited[cell] = false;
            }
        }
    }
}

/// Ideal-point lower bound on the remaining cost from every node.
struct LowerBounds {
    obstruction: Vec<f64>,
    turns: Vec<f64>,
    distance: Vec<f64>,
}

impl LowerBounds {
    fn compute(graph: &LatticeGraph, goal: &GoalSpec) -> Self {
        let n = graph.id_bound();
        let mut reverse: Vec<Vec<(usize, CostVector)>> = vec![Vec::new(); n];
        for node in graph.nodes() {
            let from = graph.node_id(&node);
            for e in graph.edges_by_id(from) {
                reverse[graph.node_id(&e.to)].push((from, e.cost));
            }
        }
        let targets: Vec<usize> = graph
            .nodes()
            .filter(|n| goal.is_satisfied_by(n))
            .map(|n| graph.node_id(&n))
            .collect();
        // summation order differs from the path sums; shave rounding off the
        // real-valued bounds so they never exceed a true residual
        let shave = |v: Vec<f64>| {
            v.into_iter()
                .map(|d| {
                    if d.is_finite() {
                        (d - 1e-9 * (1.0 + d)).max(0.0)
                    } else {
                        d
                    }
                })
                .collect()
        };
        Self {
            obstruction: shave(reverse_dijkstra(&reverse, &targets, |c| c.obstruction)),
            turns: reverse_dijkstra(&reverse, &targets, |c| c.turns as f64),
            distance: shave(reverse_dijkstra(&reverse, &targets, |c| c.distance)),
        }
    }

    fn at(&self, id: usize) -> Option<CostVector> {
        let d = self.distance[id];
        if !d.is_finite() {
            return None;
        }
        Some(CostVector::new(
            self.obstruction[id],
            self.turns[id].round() as u32,
            d,
        ))
    }
}

fn reverse_dijkstra(
    reverse: &[Vec<(usize, CostVector)>],
    targets: &[usize],
    weight: impl Fn(&CostVector) -> f64,
) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; reverse.len()];
    let mut heap = BinaryHeap::new();
    for &t in targets {
        dist[t] = 0.0;
        heap.push(Reverse((OrdF64(0.0), t)));
    }
    while let Some(Reverse((OrdF64(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, c) in &reverse[u] {
            let nd = d + weight(&c);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((OrdF64(nd), v)));
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy)]
struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
