//! The fast factored paths against the plain rational-function ones.

use cyclic_qgr::cohomology::{integrate, DualBasis, Integrator};
use cyclic_qgr::gkm::GkmGraph;
use cyclic_qgr::model::Instance;
use cyclic_qgr::verify::{check_abbv_classes, AbbvMethod};

const INSTANCES: [(u32, &[u32]); 7] = [
    (3, &[3]),
    (2, &[2, 1]),
    (2, &[2, 2]),
    (3, &[2, 2]),
    (3, &[3, 2]),
    (4, &[3]),
    (4, &[4]),
];

#[test]
fn integrator_agrees_with_rational_functions() {
    for (n, blocks) in INSTANCES {
        let g = GkmGraph::new(&Instance::new(n, blocks.to_vec()).unwrap());
        let basis = DualBasis::compute(&g).unwrap();
        let fast = Integrator::new(&g);
        let m = g.points().len();
        // products of two classes give nonzero, non-trivial integrals
        for x in 0..m {
            let c = basis.class(x).mul(basis.class((x * 7 + 3) % m));
            for y in 0..m {
                let slow = integrate(&g, &c, y).unwrap();
                assert_eq!(
                    fast.integrate(&c, y).as_ref(),
                    slow.as_polynomial(),
                    "n={n} {blocks:?} x={x} y={y}"
                );
            }
        }
        for method in [AbbvMethod::RationalFunction, AbbvMethod::Factored] {
            assert!(check_abbv_classes(&g, basis.classes(), method).unwrap().passed());
        }
    }
}

#[test]
fn triangular_expansion_agrees_with_integrals() {
    for (n, blocks) in INSTANCES {
        let g = GkmGraph::new(&Instance::new(n, blocks.to_vec()).unwrap());
        let basis = DualBasis::compute(&g).unwrap();
        let m = g.points().len();
        for x in 0..m {
            for y in x..m {
                let product = basis.class(x).mul(basis.class(y));
                assert_eq!(
                    basis.expand(&g, &product),
                    Some(basis.structure_constants(&g, x, y).unwrap()),
                    "n={n} {blocks:?} x={x} y={y}"
                );
            }
        }
    }
}
