//! The SE(2) grid graph: positions every `delta` meters, eight headings per
//! position, rotation-in-place edges (Type-A) and heading-aligned straight
//! edges (Type-B), each carrying a [`CostVector`].

use crate::cost::CostVector;
use crate::geom::Point2;
use crate::gridmap::{ObstructionField, RobotModel, WorkspaceMap};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::SQRT_2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error(
        "lattice step {delta} is not a positive integer multiple of map resolution {resolution}"
    )]
    Step { delta: f64, resolution: f64 },
    #[error("unknown lattice node {0:?}")]
    UnknownNode(LatticeNode),
}

/// One of the eight lattice headings, stored as a multiple of 45°.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Heading(u8);

impl Heading {
    pub const ALL: [Heading; 8] = [
        Heading(0),
        Heading(1),
        Heading(2),
        Heading(3),
        Heading(4),
        Heading(5),
        Heading(6),
        Heading(7),
    ];

    pub const EAST: Heading = Heading(0);
    pub const NORTH: Heading = Heading(2);

    pub fn from_index(index: usize) -> Option<Heading> {
        (index < 8).then_some(Heading(index as u8))
    }

    /// Accepts any angle that is a multiple of 45° (within 1e-9), wrapped.
    pub fn from_degrees(deg: f64) -> Option<Heading> {
        if !deg.is_finite() {
            return None;
        }
        let steps = deg / 45.0;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 {
            return None;
        }
        Some(Heading((rounded as i64).rem_euclid(8) as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn degrees(self) -> f64 {
        45.0 * self.0 as f64
    }

    pub fn is_diagonal(self) -> bool {
        self.0 % 2 == 1
    }

    /// Grid displacement of one straight step along this heading.
    pub fn step(self) -> (i64, i64) {
        const STEPS: [(i64, i64); 8] = [
            (1, 0),
            (1, 1),
            (0, 1),
            (-1, 1),
            (-1, 0),
            (-1, -1),
            (0, -1),
            (1, -1),
        ];
        STEPS[self.0 as usize]
    }

    pub fn opposite(self) -> Heading {
        Heading((self.0 + 4) % 8)
    }
}

impl Serialize for Heading {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Heading {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let deg = f64::deserialize(d)?;
        Heading::from_degrees(deg).ok_or_else(|| {
            serde::de::Error::custom(format!("heading {deg} is not a multiple of 45"))
        })
    }
}

/// A lattice state: grid position indices plus heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeNode {
    pub ix: usize,
    pub iy: usize,
    #[serde(rename = "heading_deg")]
    pub heading: Heading,
}

impl LatticeNode {
    pub fn new(ix: usize, iy: usize, heading: Heading) -> Self {
        Self { ix, iy, heading }
    }

    pub fn same_position(&self, other: &LatticeNode) -> bool {
        self.ix == other.ix && self.iy == other.iy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Type-A: rotate in place to another heading.
    #[serde(rename = "A")]
    Rotation,
    /// Type-B: move straight to the heading-aligned 8-neighbor.
    #[serde(rename = "B")]
    Straight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeEdge {
    pub from: LatticeNode,
    pub to: LatticeNode,
    pub kind: EdgeKind,
    pub cost: CostVector,
}

/// Structural kind of a `from -> to` pair, or `None` if the pair is not an
/// edge under the connectivity rules.
pub fn classify(from: &LatticeNode, to: &LatticeNode) -> Option<EdgeKind> {
    if from.same_position(to) {
        return (from.heading != to.heading).then_some(EdgeKind::Rotation);
    }
    if from.heading != to.heading {
        return None;
    }
    let (dx, dy) = from.heading.step();
    let aligned = to.ix as i64 - from.ix as i64 == dx && to.iy as i64 - from.iy as i64 == dy;
    aligned.then_some(EdgeKind::Straight)
}

/// Cost of an edge given the obstruction value at its destination position.
pub fn edge_cost(
    from: &LatticeNode,
    kind: EdgeKind,
    destination_obstruction: f64,
    delta: f64,
) -> CostVector {
    match kind {
        EdgeKind::Rotation => CostVector::new(destination_obstruction, 1, 0.0),
        EdgeKind::Straight => {
            let length = if from.heading.is_diagonal() {
                SQRT_2 * delta
            } else {
                delta
            };
            CostVector::new(destination_obstruction, 0, length)
        }
    }
}

/// True iff a disc of radius `rho` can slide from `a` to `b` without
/// touching obstacles. The sweep is checked exactly, which is the limit of
/// sampling the footprint ever more densely along the segment.
pub fn segment_free(map: &WorkspaceMap, a: Point2, b: Point2, rho: f64) -> bool {
    map.sweep_free(a, b, rho)
}

/// Lattice dimensions and the mapping between lattice indices and the map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeGeometry {
    pub delta: f64,
    /// Map cells per lattice step.
    pub stride: usize,
    pub nx: usize,
    pub ny: usize,
}

impl LatticeGeometry {
    pub fn new(map: &WorkspaceMap, delta: f64) -> Result<Self, LatticeError> {
        let err = LatticeError::Step {
            delta,
            resolution: map.resolution(),
        };
        if !(delta.is_finite() && delta > 0.0) {
            return Err(err);
        }
        let ratio = delta / map.resolution();
        let stride = ratio.round();
        if stride < 1.0 || (ratio - stride).abs() > 1e-9 * ratio.max(1.0) {
            return Err(err);
        }
        let stride = stride as usize;
        Ok(Self {
            delta,
            stride,
            nx: map.width().div_ceil(stride),
            ny: map.height().div_ceil(stride),
        })
    }

    pub fn contains(&self, ix: usize, iy: usize) -> bool {
        ix < self.nx && iy < self.ny
    }

    pub fn cell_of(&self, ix: usize, iy: usize) -> (usize, usize) {
        (ix * self.stride, iy * self.stride)
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny * 8
    }

    pub fn node_id(&self, node: &LatticeNode) -> usize {
        (node.iy * self.nx + node.ix) * 8 + node.heading.index()
    }

    pub fn node_from_id(&self, id: usize) -> LatticeNode {
        let pos = id / 8;
        LatticeNode::new(pos % self.nx, pos / self.nx, Heading::ALL[id % 8])
    }

    /// Lattice position nearest to the map cell containing `p`.
    pub fn snap(&self, map: &WorkspaceMap, p: Point2) -> Option<(usize, usize)> {
        let (cx, cy) = map.world_to_cell(p)?;
        let k = self.stride;
        Some((
            ((cx + k / 2) / k).min(self.nx - 1),
            ((cy + k / 2) / k).min(self.ny - 1),
        ))
    }
}

/// The weighted directed lattice graph. Immutable once built.
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    map: WorkspaceMap,
    model: RobotModel,
    geometry: LatticeGeometry,
    field: ObstructionField,
    free: Vec<bool>,
    adjacency: Vec<Vec<LatticeEdge>>,
}

impl LatticeGraph {
    pub fn build(map: &WorkspaceMap, model: &RobotModel, delta: f64) -> Result<Self, LatticeError> {
        let geometry = LatticeGeometry::new(map, delta)?;
        let field = map.obstruction_field(model.camera_clearance_radius());
        let rho = model.footprint_radius();
        let LatticeGeometry { nx, ny, .. } = geometry;

        let position = |ix: usize, iy: usize| {
            let (cx, cy) = geometry.cell_of(ix, iy);
            map.cell_center(cx, cy)
        };
        let mut free = vec![false; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                free[iy * nx + ix] = map.footprint_free(position(ix, iy), rho);
            }
        }

        let mut adjacency = vec![Vec::new(); geometry.node_count()];
        for iy in 0..ny {
            for ix in 0..nx {
                if !free[iy * nx + ix] {
                    continue;
                }
                let p = position(ix, iy);
                let (cx, cy) = geometry.cell_of(ix, iy);
                let here = field.get(cx, cy);
                // straight successor per heading, validated once per position
                let straight: Vec<Option<(usize, usize, f64)>> = Heading::ALL
                    .iter()
                    .map(|h| {
                        let (dx, dy) = h.step();
                        let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                        if jx < 0 || jy < 0 || !geometry.contains(jx as usize, jy as usize) {
                            return None;
                        }
                        let (jx, jy) = (jx as usize, jy as usize);
                        if !free[jy * nx + jx] || !segment_free(map, p, position(jx, jy), rho) {
                            return None;
                        }
                        let (qx, qy) = geometry.cell_of(jx, jy);
                        Some((jx, jy, field.get(qx, qy)))
                    })
                    .collect();

                for h in Heading::ALL {
                    let from = LatticeNode::new(ix, iy, h);
                    let edges = &mut adjacency[geometry.node_id(&from)];
                    for h2 in Heading::ALL {
                        if h2 != h {
                            edges.push(LatticeEdge {
                                from,
                                to: LatticeNode::new(ix, iy, h2),
                                kind: EdgeKind::Rotation,
                                cost: edge_cost(&from, EdgeKind::Rotation, here, delta),
                            });
                        }
                    }
                    if let Some((jx, jy, phi)) = straight[h.index()] {
                        edges.push(LatticeEdge {
                            from,
                            to: LatticeNode::new(jx, jy, h),
                            kind: EdgeKind::Straight,
                            cost: edge_cost(&from, EdgeKind::Straight, phi, delta),
                        });
                    }
                }
            }
        }

        Ok(Self {
            map: map.clone(),
            model: *model,
            geometry,
            field,
            free,
            adjacency,
        })
    }

    pub fn map(&self) -> &WorkspaceMap {
        &self.map
    }

    pub fn model(&self) -> &RobotModel {
        &self.model
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn delta(&self) -> f64 {
        self.geometry.delta
    }

    pub fn field(&self) -> &ObstructionField {
        &self.field
    }

    /// Whether `(ix, iy)` is inside the lattice and its footprint is free.
    pub fn position_free(&self, ix: usize, iy: usize) -> bool {
        self.geometry.contains(ix, iy) && self.free[iy * self.geometry.nx + ix]
    }

    pub fn contains(&self, node: &LatticeNode) -> bool {
        self.position_free(node.ix, node.iy)
    }

    pub fn position(&self, ix: usize, iy: usize) -> Point2 {
        let (cx, cy) = self.geometry.cell_of(ix, iy);
        self.map.cell_center(cx, cy)
    }

    pub fn node_position(&self, node: &LatticeNode) -> Point2 {
        self.position(node.ix, node.iy)
    }

    /// Obstruction ratio at a lattice position.
    pub fn obstruction_at(&self, ix: usize, iy: usize) -> f64 {
        let (cx, cy) = self.geometry.cell_of(ix, iy);
        self.field.get(cx, cy)
    }

    pub fn node_id(&self, node: &LatticeNode) -> usize {
        self.geometry.node_id(node)
    }

    pub fn node_from_id(&self, id: usize) -> LatticeNode {
        self.geometry.node_from_id(id)
    }

    /// Upper bound on node ids (valid or not).
    pub fn id_bound(&self) -> usize {
        self.geometry.node_count()
    }

    pub fn node_count(&self) -> usize {
        self.free.iter().filter(|&&f| f).count() * 8
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = LatticeNode> + '_ {
        (0..self.id_bound())
            .map(|id| self.node_from_id(id))
            .filter(|n| self.contains(n))
    }

    /// Outgoing edges: Type-A by ascending target heading, then Type-B.
    pub fn neighbors(&self, node: &LatticeNode) -> Result<&[LatticeEdge], LatticeError> {
        if !self.contains(node) {
            return Err(LatticeError::UnknownNode(*node));
        }
        Ok(&self.adjacency[self.node_id(node)])
    }

    pub(crate) fn edges_by_id(&self, id: usize) -> &[LatticeEdge] {
        &self.adjacency[id]
    }

    /// Re-checks an edge against the map with the model's footprint.
    pub fn validate_edge(&self, edge: &LatticeEdge) -> bool {
        let rho = self.model.footprint_radius();
        match edge.kind {
            EdgeKind::Rotation => self.map.footprint_free(self.node_position(&edge.from), rho),
            EdgeKind::Straight => segment_free(
                &self.map,
                self.node_position(&edge.from),
                self.node_position(&edge.to),
                rho,
            ),
        }
    }

    /// Debug dump of all nodes and edges. Not a stable format.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let nodes: Vec<LatticeNode> = self.nodes().collect();
        let edges: Vec<&LatticeEdge> = self.adjacency.iter().flatten().collect();
        serde_json::json!({
            "delta": self.delta(),
            "nx": self.geometry.nx,
            "ny": self.geometry.ny,
            "nodes": nodes,
            "edges": edges,
        })
    }
}
