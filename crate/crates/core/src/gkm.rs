//! The oriented, labeled GKM graph.
//!
//! Edges leave a fixed point `p` once for every mutation of one of its
//! movable parts. A mutation of the part `(g, m, l)` is given by a split
//! offset `i ≤ m` and a new block `k`:
//!
//! * `i = m` moves the whole part to the same positions of a later block `k`
//!   (needs `k > l` and `j_k ≥ m + 1`);
//! * `i < m` re-ends the run at offset `i` in block `k` (needs `j_k ≥ i + 1`)
//!   while offsets `i + 1 ..= m` keep their boxes.
//!
//! The label of `p → q` is the tangent weight of the connecting curve at `q`:
//!
//! ```text
//! t[(m+g) mod n][l] + (j_l − j_k + i − m)·t0 − t[(i+g) mod n][k]
//! ```
//!
//! and its negative is the tangent weight at `p`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cells::CellPoset;
use crate::exactalg::{product_of_linear, Character, Polynomial, VarId};
use crate::fixpoints::{FixedPoint, FixedPointJson, FixedPointSet, MovablePart};
use crate::model::{Instance, TableauBox};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GkmError {
    #[error("movable part {0:?} does not occur in the source point")]
    UnknownPart(MovablePart),
    #[error("split offset {split} exceeds part length {len}")]
    SplitOutOfRange { split: u32, len: u32 },
    #[error("block {0} does not exist")]
    NoSuchBlock(u32),
    #[error("block {block} is too short for the mutation")]
    BlockTooShort { block: u32 },
    #[error("a whole-part move must go to a later block (from {from} to {to})")]
    NotLower { from: u32, to: u32 },
    #[error("{0} is not in the closed cell of {1}")]
    NotInClosure(String, String),
    #[error("malformed graph document: {0}")]
    Document(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mutation {
    pub part: MovablePartKey,
    pub split: u32,
    pub new_block: u32,
}

/// [`MovablePart`] with a total order, so mutations sort deterministically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MovablePartKey {
    pub start: u32,
    pub len: u32,
    pub block: u32,
}

impl From<MovablePart> for MovablePartKey {
    fn from(p: MovablePart) -> Self {
        MovablePartKey {
            start: p.start.0,
            len: p.len,
            block: p.block,
        }
    }
}

impl Mutation {
    pub fn new(part: MovablePart, split: u32, new_block: u32) -> Self {
        Mutation {
            part: part.into(),
            split,
            new_block,
        }
    }

    /// 1 for a whole-part move, 2 for a split.
    pub fn kind(&self) -> u8 {
        if self.split == self.part.len {
            1
        } else {
            2
        }
    }

    fn check_shape(&self, inst: &Instance) -> Result<(), GkmError> {
        let MovablePartKey { len: m, block: l, .. } = self.part;
        let (i, k) = (self.split, self.new_block);
        if i > m {
            return Err(GkmError::SplitOutOfRange { split: i, len: m });
        }
        if k == 0 || k > inst.num_blocks() {
            return Err(GkmError::NoSuchBlock(k));
        }
        if i == m && k <= l {
            return Err(GkmError::NotLower { from: l, to: k });
        }
        if inst.block_size(k) < i + 1 {
            return Err(GkmError::BlockTooShort { block: k });
        }
        Ok(())
    }
}

/// All mutations of `p`, ordered by part start, split offset, then block.
pub fn mutations(inst: &Instance, p: &FixedPoint) -> Vec<Mutation> {
    p.movable_parts(inst)
        .into_iter()
        .flat_map(|part| part_mutations(inst, part))
        .collect()
}

/// The shape-admissible mutations of one movable part, by split then block.
/// Depends only on the part's length and block, not on the other parts.
pub fn part_mutations(inst: &Instance, part: MovablePart) -> Vec<Mutation> {
    let mut out = Vec::new();
    for i in 0..=part.len {
        for k in 1..=inst.num_blocks() {
            let mu = Mutation::new(part, i, k);
            if mu.check_shape(inst).is_ok() {
                out.push(mu);
            }
        }
    }
    out
}

pub fn apply_mutation(inst: &Instance, p: &FixedPoint, mu: &Mutation) -> Result<FixedPoint, GkmError> {
    let part = p
        .movable_parts(inst)
        .into_iter()
        .find(|q| MovablePartKey::from(*q) == mu.part)
        .ok_or({
            GkmError::UnknownPart(MovablePart {
                start: crate::model::VertexId(mu.part.start),
                len: mu.part.len,
                block: mu.part.block,
            })
        })?;
    mu.check_shape(inst)?;
    let (i, k) = (mu.split, mu.new_block);
    let jk = inst.block_size(k);
    let mut boxes = p.boxes().to_vec();
    for r in 0..=i {
        boxes[part.vertex(inst, r).0 as usize] = TableauBox::new(k, jk - i + r);
    }
    Ok(FixedPoint::from_boxes_unchecked(boxes))
}

pub fn edge_label(inst: &Instance, mu: &Mutation) -> Character {
    let n = inst.n();
    let MovablePartKey {
        start: g,
        len: m,
        block: l,
    } = mu.part;
    let (i, k) = (mu.split, mu.new_block);
    let t0 = i64::from(inst.block_size(l)) - i64::from(inst.block_size(k)) + i64::from(i) - i64::from(m);
    Character::from_terms([
        (VarId::rot(i64::from(m + g), l, n), 1),
        (VarId::T0, t0),
        (VarId::rot(i64::from(i + g), k, n), -1),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GkmEdge {
    pub src: usize,
    pub dst: usize,
    pub label: Character,
    pub mutation: Mutation,
}

/// The GKM graph over the canonically ordered fixed points, with the cell
/// poset it refines.
#[derive(Debug, Clone)]
pub struct GkmGraph {
    poset: CellPoset,
    edges: Vec<GkmEdge>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl GkmGraph {
    pub fn new(inst: &Instance) -> Self {
        GkmGraph::from_poset(CellPoset::new(inst))
    }

    pub fn from_poset(poset: CellPoset) -> Self {
        let inst = poset.instance().clone();
        let points = poset.points();
        let mut edges = Vec::new();
        for (src, p) in points.points().iter().enumerate() {
            for mu in mutations(&inst, p) {
                let q = apply_mutation(&inst, p, &mu).expect("generated mutations are valid");
                let dst = points.index_of(&q).expect("mutation yields a fixed point");
                edges.push(GkmEdge {
                    src,
                    dst,
                    label: edge_label(&inst, &mu),
                    mutation: mu,
                });
            }
        }
        GkmGraph::assemble(poset, edges)
    }

    fn assemble(poset: CellPoset, edges: Vec<GkmEdge>) -> Self {
        let mut out_edges = vec![Vec::new(); poset.len()];
        let mut in_edges = vec![Vec::new(); poset.len()];
        for (e, edge) in edges.iter().enumerate() {
            out_edges[edge.src].push(e);
            in_edges[edge.dst].push(e);
        }
        GkmGraph {
            poset,
            edges,
            out_edges,
            in_edges,
        }
    }

    pub fn instance(&self) -> &Instance {
        self.poset.instance()
    }

    pub fn poset(&self) -> &CellPoset {
        &self.poset
    }

    pub fn points(&self) -> &FixedPointSet {
        self.poset.points()
    }

    pub fn edges(&self) -> &[GkmEdge] {
        &self.edges
    }

    pub fn out_edges(&self, p: usize) -> impl Iterator<Item = &GkmEdge> {
        self.out_edges[p].iter().map(move |&e| &self.edges[e])
    }

    pub fn in_edges(&self, p: usize) -> impl Iterator<Item = &GkmEdge> {
        self.in_edges[p].iter().map(move |&e| &self.edges[e])
    }

    /// Tangent weights of `C̄_y` at `z`: one per edge at `z` whose other end
    /// lies in `C̄_y` — the label for an edge into `z`, its negative for an
    /// edge out of `z`.
    ///
    /// `C̄_y` is cut out of `X` by requiring the line at each vertex to lie in
    /// a span of boxes, so an invariant curve lies in it exactly when both of
    /// its fixed points do. Out-going edges of `z` may leave `C̄_y` when
    /// several blocks are present.
    pub fn tangent_weights(&self, z: usize, y: usize) -> Result<Vec<Character>, GkmError> {
        if !self.poset.contains(y, z) {
            return Err(GkmError::NotInClosure(
                self.points().label(z),
                self.points().label(y),
            ));
        }
        let incoming = self
            .in_edges(z)
            .filter(|e| self.poset.contains(y, e.src))
            .map(|e| e.label.clone());
        let outgoing = self
            .out_edges(z)
            .filter(|e| self.poset.contains(y, e.dst))
            .map(|e| e.label.neg());
        Ok(incoming.chain(outgoing).collect())
    }

    /// `e(T_z C̄_y)`.
    pub fn euler_class(&self, z: usize, y: usize) -> Result<Polynomial, GkmError> {
        Ok(product_of_linear(&self.tangent_weights(z, y)?))
    }

    /// Index of the rotated point.
    pub fn rotate_index(&self, p: usize, steps: i64) -> usize {
        let q = self.points().point(p).rotate(steps);
        self.points()
            .index_of(&q)
            .expect("rotation preserves fixed points")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph gkm {\n");
        for k in 0..self.poset.len() {
            let _ = writeln!(out, "  n{k} [label=\"{}\"];", self.points().label(k));
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.src, e.dst, e.label);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> GraphJson {
        let inst = self.instance();
        GraphJson {
            instance: inst.clone(),
            points: self.points().points().iter().map(|p| p.to_json(inst)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    src: e.src,
                    dst: e.dst,
                    label: e.label.clone(),
                    kind: e.mutation.kind(),
                    mutation: e.mutation,
                })
                .collect(),
        }
    }

    /// Rebuilds a graph from its JSON document, checking that the points are
    /// the canonical fixed points of the instance.
    pub fn from_json(doc: &GraphJson) -> Result<Self, GkmError> {
        let poset = CellPoset::new(&doc.instance);
        let inst = &doc.instance;
        if doc.points.len() != poset.len() {
            return Err(GkmError::Document("wrong number of points".into()));
        }
        for (k, js) in doc.points.iter().enumerate() {
            let p = FixedPoint::from_json(inst, js).map_err(|e| GkmError::Document(e.to_string()))?;
            if &p != poset.points().point(k) {
                return Err(GkmError::Document(format!("point {k} out of canonical order")));
            }
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            if e.src >= poset.len() || e.dst >= poset.len() {
                return Err(GkmError::Document("edge endpoint out of range".into()));
            }
            edges.push(GkmEdge {
                src: e.src,
                dst: e.dst,
                label: e.label.clone(),
                mutation: e.mutation,
            });
        }
        Ok(GkmGraph::assemble(poset, edges))
    }
}

impl PartialEq for GkmGraph {
    fn eq(&self, other: &Self) -> bool {
        self.instance() == other.instance() && self.edges == other.edges
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub instance: Instance,
    pub points: Vec<FixedPointJson>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub src: usize,
    pub dst: usize,
    pub label: Character,
    #[serde(rename = "type")]
    pub kind: u8,
    pub mutation: Mutation,
}

/// How labels written in another naming relate to ours: optionally negate
/// (every coefficient, or the `t0` coefficient only), then rename
/// `t[r][s]` to `t[(r + shift) mod n][s]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LabelConvention {
    pub sign: SignChange,
    pub shift: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SignChange {
    None,
    Global,
    T0Only,
}

impl LabelConvention {
    pub fn apply(&self, w: &Character, n: u32) -> Character {
        let signed = match self.sign {
            SignChange::None => w.clone(),
            SignChange::Global => w.neg(),
            SignChange::T0Only => {
                let c = w.coeff(VarId::T0);
                w.add(&Character::var(VarId::T0).scale(-2 * c))
            }
        };
        signed.rho_shift(i64::from(self.shift), n)
    }

    /// All conventions under which `ours` maps onto `reference`, edge by
    /// edge. Both lists are `(src, dst, label)` with the same endpoints.
    pub fn search(
        n: u32,
        ours: &[(usize, usize, Character)],
        reference: &[(usize, usize, Character)],
    ) -> Vec<LabelConvention> {
        let mut found = Vec::new();
        for sign in [SignChange::None, SignChange::Global, SignChange::T0Only] {
            for shift in 0..n {
                let conv = LabelConvention { sign, shift };
                let ok = ours.len() == reference.len()
                    && ours.iter().all(|(s, d, w)| {
                        reference
                            .iter()
                            .any(|(rs, rd, rw)| rs == s && rd == d && *rw == conv.apply(w, n))
                    });
                if ok {
                    found.push(conv);
                }
            }
        }
        found
    }
}
