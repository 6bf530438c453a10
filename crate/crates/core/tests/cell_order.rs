//! The closure relation against the coordinate-wise order: exhaustive
//! equalities for one block, and the ways they part with several.

use std::collections::BTreeSet;

use cyclic_qgr::cells::{closed_cell_intersection, closure_contains};
use cyclic_qgr::fixpoints::FixedPoint;
use cyclic_qgr::gkm::GkmGraph;
use cyclic_qgr::model::Instance;

fn single_blocks() -> impl Iterator<Item = Instance> {
    (1..=5).flat_map(|n| (1..=5).map(move |size| Instance::new(n, vec![size]).unwrap()))
}

fn ends(i: &Instance, p: &FixedPoint) -> BTreeSet<u32> {
    p.ending_set(i).into_iter().collect()
}

#[test]
fn single_block_orders_agree_with_inclusion() {
    for i in single_blocks() {
        let g = GkmGraph::new(&i);
        let points = g.points().points();
        for (a, p) in points.iter().enumerate() {
            assert_eq!(
                g.poset().dim(a),
                i.n() - ends(&i, p).len() as u32,
                "{i} {}",
                g.points().label(a)
            );
            for e in g.out_edges(a) {
                assert!(g.poset().dim(e.dst) < g.poset().dim(a), "{i}");
            }
            for (b, q) in points.iter().enumerate() {
                let included = ends(&i, p).is_subset(&ends(&i, q));
                assert_eq!(p.leq(q, &i), included, "{i}");
                assert_eq!(closure_contains(&i, p, q), included, "{i}");
                assert_eq!(g.poset().precedes(a, b), included, "{i}");
            }
        }
    }
}

#[test]
fn single_block_intersection_law() {
    for i in single_blocks() {
        let points = GkmGraph::new(&i).points().points().to_vec();
        for p in &points {
            for q in &points {
                let meet = closed_cell_intersection(&i, p, q).unwrap();
                // the meet lies above both points coordinate-wise
                assert!(p.leq(&meet, &i) && q.leq(&meet, &i), "{i}");
                for s in &points {
                    assert_eq!(
                        closure_contains(&i, &meet, s),
                        closure_contains(&i, p, s) && closure_contains(&i, q, s),
                        "{i}"
                    );
                }
            }
        }
    }
}

#[test]
fn several_blocks() {
    let mut out_edge_leaves_cell = false;
    let mut membership_not_transitive = false;
    let mut dimension_goes_up = false;
    for (n, blocks) in [
        (2, vec![2, 1]),
        (3, vec![2, 1]),
        (3, vec![3, 2]),
        (2, vec![2, 2, 1]),
        (4, vec![2, 1, 1]),
    ] {
        let i = Instance::new(n, blocks).unwrap();
        let g = GkmGraph::new(&i);
        let poset = g.poset();
        let m = g.points().len();
        // a closed cell may contain a fixed point whose open cell is larger
        dimension_goes_up |= g.edges().iter().any(|e| poset.dim(e.dst) > poset.dim(e.src));
        for y in 0..m {
            for z in (0..m).filter(|&z| poset.contains(y, z)) {
                assert_eq!(g.tangent_weights(z, y).unwrap().len() as u32, poset.dim(y), "{i}");
                out_edge_leaves_cell |= g.out_edges(z).any(|e| !poset.contains(y, e.dst));
                membership_not_transitive |= (0..m).any(|s| poset.contains(z, s) && !poset.contains(y, s));
                assert!(poset.fp_leq(y, z));
            }
        }
    }
    assert!(out_edge_leaves_cell);
    assert!(membership_not_transitive);
    assert!(dimension_goes_up);
}
