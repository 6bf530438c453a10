//! Białynicki-Birula cells: dimensions, the closure poset and its Hasse
//! diagram, the Poincaré polynomial and the single-block intersection law.
//!
//! Let `x` have a movable part starting at vertex `g` with box `b`, of length
//! `m`. The closure of that part's cell is the quiver Grassmannian of the
//! chain `V_{≥b} → J V_{≥b} → … → J^m V_{≥b}`, whose maps are onto; so a
//! fixed point `s` lies in `C̄_x` iff for every part and every offset `r`,
//! `s(g + r) = J^r c` for some box `c ≥ b`. This implies `x ≤ s`
//! coordinate-wise, and for a single block the two conditions agree. With
//! several blocks they can differ: for `n = 2`, blocks `[2, 1]`, the point
//! `(v_2^1, v_1^1)` lies below `(v_1^2, v_2^1)` coordinate-wise, yet its closed
//! cell `{L_0 = ⟨v_2^1⟩}` misses that point.
//!
//! Membership `s ∈ C̄_x` is not transitive once there are several blocks: a
//! closed cell can contain the fixed point `s` without containing `C̄_s`. The
//! cell order is the relation it generates, `x ⪯ s` iff a chain
//! `x = c_0, …, c_k = s` has `c_{i+1} ∈ C̄_{c_i}`; it refines the
//! coordinate-wise order, and equals membership for a single block.
//!
//! Covering pairs are reported as `(lower, upper)`, i.e. `(x, s)` with
//! `x ⪯ s`, which is also the orientation of GKM edges.

use std::cmp::Ordering;

use serde::Serialize;

use crate::fixpoints::{fp_meet, FixedPoint, FixedPointJson, FixedPointSet, FixpointError};
use crate::model::{Instance, TableauBox};

/// Dimension of the open cell `C_p`: for every movable part, the number of
/// boxes above the box at its start.
pub fn cell_dim(inst: &Instance, p: &FixedPoint) -> u32 {
    p.movable_parts(inst)
        .iter()
        .map(|part| inst.count_greater(p.at(part.start)))
        .sum()
}

/// `s ∈ C̄_x`.
pub fn closure_contains(inst: &Instance, x: &FixedPoint, s: &FixedPoint) -> bool {
    x.movable_parts(inst).iter().all(|part| {
        let b = x.at(part.start);
        (0..=part.len).all(|r| {
            let t = s.at(part.vertex(inst, r));
            t.i > r && inst.box_compare(TableauBox::new(t.l, t.i - r), b) != Ordering::Less
        })
    })
}

/// `C̄_p ∩ C̄_q = C̄_{meet}` for a single block.
pub fn closed_cell_intersection(
    inst: &Instance,
    p: &FixedPoint,
    q: &FixedPoint,
) -> Result<FixedPoint, FixpointError> {
    fp_meet(inst, p, q)
}

/// Dense square bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    size: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(size: usize) -> Self {
        let words = size.div_ceil(64).max(1);
        BitMatrix {
            size,
            words,
            bits: vec![0; size * words],
        }
    }

    pub(crate) fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    /// Row `r` |= row `c`.
    fn union_row(&mut self, r: usize, c: usize) {
        for k in 0..self.words {
            self.bits[r * self.words + k] |= self.bits[c * self.words + k];
        }
    }

    pub(crate) fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.size).filter(move |&c| self.get(r, c))
    }
}

/// The fixed points with cell dimensions, the closure relation, the cell
/// order it generates and the coordinate-wise order.
#[derive(Debug, Clone)]
pub struct CellPoset {
    points: FixedPointSet,
    dims: Vec<u32>,
    closure: BitMatrix,
    reach: BitMatrix,
    order: BitMatrix,
    weight: Vec<i64>,
}

impl CellPoset {
    pub fn new(inst: &Instance) -> Self {
        CellPoset::from_points(FixedPointSet::new(inst))
    }

    pub fn from_points(points: FixedPointSet) -> Self {
        let inst = points.instance();
        let pts = points.points();
        let dims = pts.iter().map(|p| cell_dim(inst, p)).collect();
        let mut closure = BitMatrix::new(pts.len());
        let mut order = BitMatrix::new(pts.len());
        for (a, p) in pts.iter().enumerate() {
            for (b, q) in pts.iter().enumerate() {
                if p.leq(q, inst) {
                    order.set(a, b);
                    if closure_contains(inst, p, q) {
                        closure.set(a, b);
                    }
                }
            }
        }
        let weight = pts
            .iter()
            .map(|p| p.boxes().iter().map(|&b| inst.cweight(b)).sum())
            .collect();
        let mut poset = CellPoset {
            points,
            dims,
            reach: BitMatrix::new(closure.size),
            closure,
            order,
            weight,
        };
        for a in poset.inner_first() {
            poset.reach.set(a, a);
            for c in poset.closure.row_ones(a).filter(|&c| c != a).collect::<Vec<_>>() {
                poset.reach.union_row(a, c);
            }
        }
        poset
    }

    pub fn points(&self) -> &FixedPointSet {
        &self.points
    }

    pub fn instance(&self) -> &Instance {
        self.points.instance()
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, k: usize) -> u32 {
        self.dims[k]
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    /// `point(b) ∈ C̄_{point(a)}`.
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.closure.get(a, b)
    }

    /// `a ⪯ b` in the cell order: a chain of closure memberships leads from
    /// `a` to `b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.reach.get(a, b)
    }

    /// Coordinate-wise `point(a) ≤ point(b)`.
    pub fn fp_leq(&self, a: usize, b: usize) -> bool {
        self.order.get(a, b)
    }

    /// The fixed points of `C̄_{point(a)}`, ascending by index.
    pub fn closure_points(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.closure.row_ones(a)
    }

    /// All points ordered so that `b` comes before `a` whenever `a ⪯ b`,
    /// `a ≠ b`: by decreasing total box weight, which strictly increases
    /// along the coordinate-wise order. Cell dimension alone is not enough,
    /// since a closed cell can contain a fixed point whose own cell has the
    /// same dimension.
    pub fn inner_first(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&k| (std::cmp::Reverse(self.weight[k]), k));
        order
    }

    /// Covering pairs `(a, b)` of the cell order: `a ⪯ b`, `b ≠ a`, and no
    /// third point in between. Covers are closure memberships.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        let mut above = vec![0u64; self.reach.words];
        for a in 0..n {
            // everything strictly above some c with a ⪯ c, c ≠ a
            above.iter_mut().for_each(|w| *w = 0);
            for c in self.reach.row_ones(a).filter(|&c| c != a) {
                for (k, (w, &x)) in above.iter_mut().zip(self.reach.row(c)).enumerate() {
                    let own = if k == c / 64 { 1u64 << (c % 64) } else { 0 };
                    *w |= x & !own;
                }
            }
            out.extend(
                self.reach
                    .row_ones(a)
                    .filter(|&b| b != a && above[b / 64] >> (b % 64) & 1 == 0)
                    .map(|b| (a, b)),
            );
        }
        out
    }

    /// Coefficient of `q^d` is the number of `d`-dimensional cells.
    pub fn poincare_polynomial(&self) -> Vec<u64> {
        let top = self.dims.iter().copied().max().unwrap_or(0) as usize;
        let mut coeffs = vec![0u64; top + 1];
        for &d in &self.dims {
            coeffs[d as usize] += 1;
        }
        coeffs
    }

    pub fn to_json(&self) -> PosetJson {
        let inst = self.instance();
        PosetJson {
            instance: inst.clone(),
            points: self
                .points
                .points()
                .iter()
                .zip(&self.dims)
                .map(|(p, &dim)| PosetPointJson {
                    label: p.label(inst),
                    point: p.to_json(inst),
                    dim,
                })
                .collect(),
            covers: self.hasse(),
        }
    }

    /// Hasse diagram as a DOT digraph, arrows from smaller to larger points.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph poset {\n");
        for k in 0..self.len() {
            out.push_str(&format!(
                "  n{k} [label=\"{}\", dim={}];\n",
                self.points.label(k),
                self.dims[k]
            ));
        }
        for (a, b) in self.hasse() {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetJson {
    pub instance: Instance,
    pub points: Vec<PosetPointJson>,
    /// `(lower, upper)` index pairs into `points`.
    pub covers: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetPointJson {
    pub label: String,
    pub point: FixedPointJson,
    pub dim: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixpoints::decode_ending_set;
    use crate::model::TableauBox;

    fn inst(n: u32, blocks: &[u32]) -> Instance {
        Instance::new(n, blocks.to_vec()).unwrap()
    }

    #[test]
    fn dims_single_block() {
        let i = inst(3, &[3]);
        for (set, d) in [(&[0u32][..], 2), (&[0, 1], 1), (&[0, 1, 2], 0)] {
            assert_eq!(cell_dim(&i, &decode_ending_set(&i, set).unwrap()), d);
        }
        assert_eq!(CellPoset::new(&inst(1, &[1])).dims(), &[0]);
    }

    #[test]
    fn dims_two_blocks() {
        let i = inst(3, &[3, 2]);
        let p = FixedPoint::new(&i, vec![TableauBox::new(1, 3); 3]).unwrap();
        assert_eq!(cell_dim(&i, &p), 3);
    }

    #[test]
    fn closure_is_finer_than_coordinate_order() {
        let i = inst(2, &[2, 1]);
        let b = |l, k| TableauBox::new(l, k);
        let x = FixedPoint::new(&i, vec![b(1, 2), b(1, 1)]).unwrap();
        let s = FixedPoint::new(&i, vec![b(2, 1), b(1, 2)]).unwrap();
        assert!(x.leq(&s, &i));
        assert!(!closure_contains(&i, &x, &s));
        for t in [vec![b(1, 2), b(1, 2)], vec![b(1, 2), b(2, 1)]] {
            assert!(closure_contains(&i, &x, &FixedPoint::new(&i, t).unwrap()));
        }
    }

    #[test]
    fn closure_examples() {
        let i = inst(3, &[3]);
        let s = |set: &[u32]| decode_ending_set(&i, set).unwrap();
        let x = s(&[0]);
        assert!(closure_contains(&i, &x, &x));
        for t in [&[0, 1][..], &[0, 2], &[0, 1, 2]] {
            assert!(closure_contains(&i, &x, &s(t)));
        }
        assert!(!closure_contains(&i, &x, &s(&[1])));
    }

    #[test]
    fn hasse_and_poincare() {
        let poset = CellPoset::new(&inst(3, &[3]));
        let covers: Vec<(String, String)> = poset
            .hasse()
            .into_iter()
            .map(|(a, b)| (poset.points().label(a), poset.points().label(b)))
            .collect();
        assert_eq!(covers.len(), 9);
        assert!(covers.contains(&("I={0}".into(), "I={0,1}".into())));
        assert!(!covers.contains(&("I={0}".into(), "I={0,1,2}".into())));
        assert_eq!(poset.poincare_polynomial(), vec![1, 3, 3]);

        let point = CellPoset::new(&inst(1, &[1]));
        assert!(point.hasse().is_empty());
        assert_eq!(point.poincare_polynomial(), vec![1]);
    }

    #[test]
    fn intersection_examples() {
        let i = inst(3, &[3]);
        let s = |set: &[u32]| decode_ending_set(&i, set).unwrap();
        assert_eq!(
            closed_cell_intersection(&i, &s(&[0]), &s(&[1])).unwrap(),
            s(&[0, 1])
        );
        assert_eq!(
            closed_cell_intersection(&i, &s(&[0]), &s(&[0, 1, 2])).unwrap(),
            s(&[0, 1, 2])
        );
    }

    #[test]
    fn dot_has_every_node() {
        let dot = CellPoset::new(&inst(3, &[3])).to_dot();
        assert_eq!(dot.matches("label=").count(), 7);
        assert_eq!(dot.matches("->").count(), 9);
    }
}
