use pnav_core::fixtures::{museum_map, museum_model, random_instance, MUSEUM_DELTA};
use pnav_core::lattice::{classify, edge_cost, segment_free};
use pnav_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn graphs() -> Vec<LatticeGraph> {
    let mut out = vec![LatticeGraph::build(&museum_map(), &museum_model(), MUSEUM_DELTA).unwrap()];
    out.extend(
        (0..40u64)
            .filter_map(random_instance)
            .map(|i| LatticeGraph::build(&i.map, &i.model, i.delta).unwrap()),
    );
    out
}

/// Outgoing edges of `node` derived from the construction rules alone.
fn expected_edges(graph: &LatticeGraph, node: &LatticeNode) -> Vec<(LatticeNode, EdgeKind)> {
    let mut out: Vec<(LatticeNode, EdgeKind)> = Heading::ALL
        .iter()
        .filter(|&&h| h != node.heading)
        .map(|&h| (LatticeNode::new(node.ix, node.iy, h), EdgeKind::Rotation))
        .collect();
    let geo = graph.geometry();
    let (dx, dy) = node.heading.step();
    let (jx, jy) = (node.ix as i64 + dx, node.iy as i64 + dy);
    if jx >= 0 && jy >= 0 && geo.contains(jx as usize, jy as usize) {
        let (jx, jy) = (jx as usize, jy as usize);
        let rho = graph.model().footprint_radius();
        if graph.position_free(jx, jy)
            && segment_free(
                graph.map(),
                graph.position(node.ix, node.iy),
                graph.position(jx, jy),
                rho,
            )
        {
            out.push((LatticeNode::new(jx, jy, node.heading), EdgeKind::Straight));
        }
    }
    out
}

#[test]
fn stored_edges_follow_the_rules() {
    for graph in graphs() {
        for node in graph.nodes() {
            let edges = graph.neighbors(&node).unwrap();
            let derived = expected_edges(&graph, &node);
            let stored: Vec<(LatticeNode, EdgeKind)> =
                edges.iter().map(|e| (e.to, e.kind)).collect();
            assert_eq!(stored, derived, "at {node:?}");
            for e in edges {
                assert_eq!(e.from, node);
                assert_eq!(classify(&e.from, &e.to), Some(e.kind));
                let expected = edge_cost(
                    &e.from,
                    e.kind,
                    graph.obstruction_at(e.to.ix, e.to.iy),
                    graph.delta(),
                );
                assert_eq!(e.cost, expected);
                assert!(graph.validate_edge(e));
            }
        }
    }
}

#[test]
fn rotations_form_a_complete_digraph() {
    for graph in graphs() {
        for node in graph.nodes() {
            let mut targets: Vec<usize> = graph
                .neighbors(&node)
                .unwrap()
                .iter()
                .filter(|e| e.kind == EdgeKind::Rotation)
                .map(|e| {
                    assert!(e.to.same_position(&node));
                    e.to.heading.index()
                })
                .collect();
            targets.sort_unstable();
            let mut others: Vec<usize> = (0..8).filter(|&h| h != node.heading.index()).collect();
            others.sort_unstable();
            assert_eq!(targets, others);
        }
    }
}

#[test]
fn straight_moves_reverse_in_free_space() {
    let map = WorkspaceMap::new(6, 5, 0.5, Point2::new(-1.0, 2.0), vec![false; 30]).unwrap();
    let graph = LatticeGraph::build(&map, &RobotModel::new(0.2, 1.0).unwrap(), 0.5).unwrap();
    let mut straight = 0;
    for node in graph.nodes() {
        for e in graph.neighbors(&node).unwrap() {
            if e.kind != EdgeKind::Straight {
                continue;
            }
            straight += 1;
            let back = LatticeNode::new(e.to.ix, e.to.iy, node.heading.opposite());
            let home = LatticeNode::new(node.ix, node.iy, node.heading.opposite());
            assert!(graph.neighbors(&back).unwrap().iter().any(|r| r.to == home));
        }
    }
    assert!(straight > 0);
}

#[test]
fn builds_are_deterministic() {
    let (a, b) = (graphs(), graphs());
    for (ga, gb) in a.iter().zip(&b) {
        assert_eq!(ga.node_count(), gb.node_count());
        for node in ga.nodes() {
            assert_eq!(ga.neighbors(&node).unwrap(), gb.neighbors(&node).unwrap());
        }
        assert_eq!(ga.to_debug_json(), gb.to_debug_json());
    }
}

#[test]
fn nodes_match_footprint_check_around_a_block() {
    let rows = [".....", ".###.", ".###.", ".###.", "....."];
    let map = WorkspaceMap::from_rows(&rows, 1.0, Point2::default()).unwrap();
    for rho in [0.1, 0.3, 0.5] {
        let graph = LatticeGraph::build(&map, &RobotModel::new(rho, 1.0).unwrap(), 1.0).unwrap();
        for iy in 0..5 {
            for ix in 0..5 {
                let free = map.footprint_free(map.cell_center(ix, iy), rho);
                assert_eq!(graph.position_free(ix, iy), free, "({ix},{iy}) rho {rho}");
                for h in Heading::ALL {
                    assert_eq!(graph.contains(&LatticeNode::new(ix, iy, h)), free);
                }
            }
        }
        // the block itself never hosts a node
        assert!(graph
            .nodes()
            .all(|n| !(1..=3).contains(&n.ix) || !(1..=3).contains(&n.iy)));
    }
}

#[test]
fn neighbor_counts() {
    let map =
        WorkspaceMap::from_rows(&[".....", ".....", "....#"], 1.0, Point2::default()).unwrap();
    let graph = LatticeGraph::build(&map, &RobotModel::new(0.3, 1.0).unwrap(), 1.0).unwrap();
    let count = |n: LatticeNode| {
        let edges = graph.neighbors(&n).unwrap();
        let a = edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Rotation)
            .count();
        (a, edges.len() - a)
    };
    // interior, clear ahead
    assert_eq!(count(LatticeNode::new(1, 1, Heading::EAST)), (7, 1));
    // facing the obstacle at (4, 0)
    assert_eq!(count(LatticeNode::new(3, 0, Heading::EAST)), (7, 0));
    // corner node, against the map edge and outward
    let west = Heading::EAST.opposite();
    assert_eq!(count(LatticeNode::new(0, 0, west)), (7, 0));
    for h in Heading::ALL {
        let node = LatticeNode::new(0, 2, h);
        let stored = graph.neighbors(&node).unwrap();
        assert_eq!(stored.len(), expected_edges(&graph, &node).len());
    }
}

#[test]
fn diagonal_squeeze_is_blocked() {
    let map = WorkspaceMap::from_rows(&["#.", ".#"], 1.0, Point2::default()).unwrap();
    let (a, b) = (map.cell_center(0, 0), map.cell_center(1, 1));
    let sweep =
        |rho: f64| (0..=1000).all(|i| map.footprint_free(a.lerp(b, i as f64 / 1000.0), rho));
    for rho in [0.01, 0.1, 0.2, 0.4] {
        assert!(!sweep(rho));
        assert!(!segment_free(&map, a, b, rho), "rho {rho}");
        let graph = LatticeGraph::build(&map, &RobotModel::new(rho, 1.0).unwrap(), 1.0).unwrap();
        let ne = Heading::from_degrees(45.0).unwrap();
        let from = LatticeNode::new(0, 0, ne);
        assert!(graph
            .neighbors(&from)
            .unwrap()
            .iter()
            .all(|e| e.kind == EdgeKind::Rotation));
    }
}

#[test]
fn exact_sweep_never_misses_a_dense_sample() {
    let map = museum_map();
    let extent = map.extent();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut blocked = 0;
    for _ in 0..2000 {
        let a = Point2::new(rng.gen_range(0.0..extent.x), rng.gen_range(0.0..extent.y));
        let b = a + Point2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let rho = rng.gen_range(0.05..0.35);
        let dense = (0..=1000).all(|k| map.footprint_free(a.lerp(b, k as f64 / 1000.0), rho));
        let exact = segment_free(&map, a, b, rho);
        assert!(!exact || dense, "{a:?} -> {b:?} rho {rho}");
        blocked += usize::from(!exact);
    }
    assert!(blocked > 100 && blocked < 1900);
}
