//! Torus fixed points, their movable parts, the coordinate-wise order and the
//! single-block subset encoding.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, TableauBox, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixpointError {
    #[error("operation is only defined for a single Jordan block (M = 1)")]
    MultiBlock,
    #[error("ending set must be non-empty")]
    EmptySubset,
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(u32),
    #[error("gap of {gap} between consecutive ending vertices exceeds N = {total}")]
    GapTooLarge { gap: u32, total: u32 },
    #[error("expected {expected} boxes, one per vertex, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("box {0:?} does not exist in this instance")]
    InvalidBox(TableauBox),
    #[error("assignment is not successor closed at vertex {0}")]
    NotSuccessorClosed(u32),
    #[error("cannot parse fixed point `{0}` (expected `I={{…}}` or a JSON box list)")]
    Syntax(String),
}

/// A torus fixed point: one Jordan basis box per vertex, closed under `J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    boxes: Vec<TableauBox>,
}

impl FixedPoint {
    pub fn new(inst: &Instance, boxes: Vec<TableauBox>) -> Result<Self, FixpointError> {
        let n = inst.n() as usize;
        if boxes.len() != n {
            return Err(FixpointError::WrongLength {
                expected: n,
                got: boxes.len(),
            });
        }
        if let Some(b) = boxes.iter().find(|b| !inst.contains(**b)) {
            return Err(FixpointError::InvalidBox(*b));
        }
        for v in 0..n {
            if let Some(next) = inst.jmap(boxes[v]) {
                if boxes[(v + 1) % n] != next {
                    return Err(FixpointError::NotSuccessorClosed(v as u32));
                }
            }
        }
        Ok(FixedPoint { boxes })
    }

    pub(crate) fn from_boxes_unchecked(boxes: Vec<TableauBox>) -> Self {
        FixedPoint { boxes }
    }

    pub fn boxes(&self) -> &[TableauBox] {
        &self.boxes
    }

    pub fn at(&self, v: VertexId) -> TableauBox {
        self.boxes[v.0 as usize]
    }

    /// Vertices whose box ends a row (`J` kills it), ascending.
    pub fn ending_set(&self, inst: &Instance) -> Vec<u32> {
        (0..self.boxes.len() as u32)
            .filter(|&v| inst.dist(self.boxes[v as usize]) == 0)
            .collect()
    }

    /// Canonical sort key: ending set, then the block of each part in the
    /// order of its ending vertex.
    pub fn sort_key(&self, inst: &Instance) -> (Vec<u32>, Vec<u32>) {
        let ends = self.ending_set(inst);
        let blocks = ends.iter().map(|&v| self.boxes[v as usize].l).collect();
        (ends, blocks)
    }

    /// `result(v) = self(v − steps)`.
    pub fn rotate(&self, steps: i64) -> FixedPoint {
        let n = self.boxes.len() as i64;
        let boxes = (0..n)
            .map(|v| self.boxes[(v - steps).rem_euclid(n) as usize])
            .collect();
        FixedPoint { boxes }
    }

    /// The maximal runs of the fixed point, sorted by start vertex.
    pub fn movable_parts(&self, inst: &Instance) -> Vec<MovablePart> {
        let n = inst.n() as i64;
        let mut parts: Vec<MovablePart> = self
            .ending_set(inst)
            .into_iter()
            .map(|e| {
                let e = i64::from(e);
                let mut m = 0i64;
                while m + 1 < n && inst.dist(self.boxes[(e - m - 1).rem_euclid(n) as usize]) > 0 {
                    m += 1;
                }
                MovablePart {
                    start: inst.vertex(e - m),
                    len: m as u32,
                    block: self.boxes[e as usize].l,
                }
            })
            .collect();
        parts.sort_by_key(|p| p.start);
        parts
    }

    /// `true` iff `self(v) ≤ other(v)` for every vertex.
    pub fn leq(&self, other: &FixedPoint, inst: &Instance) -> bool {
        self.boxes
            .iter()
            .zip(other.boxes.iter())
            .all(|(&a, &b)| inst.box_compare(a, b) != Ordering::Greater)
    }

    /// Printable name: `I={…}` for a single block, the box list otherwise.
    pub fn label(&self, inst: &Instance) -> String {
        if inst.is_single_block() {
            let ends: Vec<String> = self.ending_set(inst).iter().map(|v| v.to_string()).collect();
            format!("I={{{}}}", ends.join(","))
        } else {
            let boxes: Vec<String> = self.boxes.iter().map(|b| format!("[{},{}]", b.l, b.i)).collect();
            format!("[{}]", boxes.join(","))
        }
    }

    pub fn to_json(&self, inst: &Instance) -> FixedPointJson {
        FixedPointJson {
            boxes: Some(self.boxes.clone()),
            ending_set: inst.is_single_block().then(|| self.ending_set(inst)),
        }
    }

    pub fn from_json(inst: &Instance, js: &FixedPointJson) -> Result<Self, FixpointError> {
        match (&js.boxes, &js.ending_set) {
            (Some(boxes), _) => FixedPoint::new(inst, boxes.clone()),
            (None, Some(set)) => decode_ending_set(inst, set),
            (None, None) => Err(FixpointError::Syntax("{}".to_string())),
        }
    }

    /// Parses `I={0,1}`, a JSON box list `[[l,i],…]`, or a JSON object with
    /// `boxes` or `I`.
    pub fn parse(inst: &Instance, s: &str) -> Result<Self, FixpointError> {
        let t = s.trim();
        let syntax = || FixpointError::Syntax(s.to_string());
        if let Some(body) = t.strip_prefix("I=") {
            let inner = body
                .trim()
                .strip_prefix('{')
                .and_then(|b| b.strip_suffix('}'))
                .ok_or_else(syntax)?;
            let set: Result<Vec<u32>, _> = inner
                .split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(str::parse)
                .collect();
            return decode_ending_set(inst, &set.map_err(|_| syntax())?);
        }
        if t.starts_with('[') {
            let boxes: Vec<TableauBox> = serde_json::from_str(t).map_err(|_| syntax())?;
            return FixedPoint::new(inst, boxes);
        }
        if t.starts_with('{') {
            let js: FixedPointJson = serde_json::from_str(t).map_err(|_| syntax())?;
            return FixedPoint::from_json(inst, &js);
        }
        Err(syntax())
    }
}

/// Wire form: `{"boxes": [[l,i], …]}`, with the single-block shorthand
/// `{"I": [vertices]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boxes: Option<Vec<TableauBox>>,
    #[serde(rename = "I", default, skip_serializing_if = "Option::is_none")]
    pub ending_set: Option<Vec<u32>>,
}

/// A maximal run of a fixed point: `len + 1` vertices from `start`, carrying
/// `v_{j_l−len}^l, …, v_{j_l}^l` of block `l = block`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MovablePart {
    pub start: VertexId,
    pub len: u32,
    pub block: u32,
}

impl Serialize for VertexId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        u32::deserialize(d).map(VertexId)
    }
}

impl MovablePart {
    /// Vertex at offset `r` along the part.
    pub fn vertex(&self, inst: &Instance, r: u32) -> VertexId {
        inst.vertex(i64::from(self.start.0) + i64::from(r))
    }

    pub fn end(&self, inst: &Instance) -> VertexId {
        self.vertex(inst, self.len)
    }
}

/// Every fixed point once, in canonical order.
///
/// Chooses a non-empty ending set, cuts the cycle into the intervals ending
/// there, and fills each interval of length `a` from any block with `j ≥ a`.
pub fn enumerate_fixed_points(inst: &Instance) -> Vec<FixedPoint> {
    let n = inst.n() as usize;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let ends: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        // (start, length) of the interval ending at each end
        let intervals: Vec<(usize, usize)> = ends
            .iter()
            .enumerate()
            .map(|(k, &e)| {
                let prev = ends[(k + ends.len() - 1) % ends.len()];
                let len = match (e + n - prev) % n {
                    0 => n,
                    a => a,
                };
                ((e + n + 1 - len) % n, len)
            })
            .collect();
        let choices: Vec<Vec<u32>> = intervals
            .iter()
            .map(|&(_, a)| {
                (1..=inst.num_blocks())
                    .filter(|&s| inst.block_size(s) as usize >= a)
                    .collect()
            })
            .collect();
        if choices.iter().any(Vec::is_empty) {
            continue;
        }
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut boxes = vec![TableauBox::new(0, 0); n];
            for (k, &(start, a)) in intervals.iter().enumerate() {
                let s = choices[k][pick[k]];
                let j = inst.block_size(s) as usize;
                for r in 0..a {
                    boxes[(start + r) % n] = TableauBox::new(s, (j - (a - 1) + r) as u32);
                }
            }
            out.push(FixedPoint { boxes });
            // odometer over the per-interval block choices
            let mut k = choices.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                pick[k] += 1;
                if pick[k] < choices[k].len() {
                    break;
                }
                pick[k] = 0;
                if k == 0 {
                    k = usize::MAX;
                    break;
                }
            }
            if k == usize::MAX {
                break;
            }
        }
    }
    out.sort_by_cached_key(|p| p.sort_key(inst));
    out
}

/// `|X^T|` from the product formula, without building the points.
pub fn count_fixed_points(inst: &Instance) -> u64 {
    let n = inst.n() as usize;
    let mut total = 0u64;
    for mask in 1u64..(1u64 << n) {
        let ends: Vec<usize> = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let mut prod = 1u64;
        for (k, &e) in ends.iter().enumerate() {
            let prev = ends[(k + ends.len() - 1) % ends.len()];
            let a = match (e + n - prev) % n {
                0 => n,
                a => a,
            };
            prod *= inst.blocks().iter().filter(|&&j| j as usize >= a).count() as u64;
        }
        total += prod;
    }
    total
}

/// Single-block decoding of an ending set.
pub fn decode_ending_set(inst: &Instance, set: &[u32]) -> Result<FixedPoint, FixpointError> {
    if !inst.is_single_block() {
        return Err(FixpointError::MultiBlock);
    }
    if set.is_empty() {
        return Err(FixpointError::EmptySubset);
    }
    let n = inst.n();
    if let Some(&v) = set.iter().find(|&&v| v >= n) {
        return Err(FixpointError::VertexOutOfRange(v));
    }
    let sorted: BTreeSet<u32> = set.iter().copied().collect();
    let ends: Vec<u32> = sorted.into_iter().collect();
    let total = inst.total_dim();
    for (k, &e) in ends.iter().enumerate() {
        let prev = ends[(k + ends.len() - 1) % ends.len()];
        let gap = match (e + n - prev) % n {
            0 => n,
            g => g,
        };
        if gap > total {
            return Err(FixpointError::GapTooLarge { gap, total });
        }
    }
    let boxes = (0..n)
        .map(|v| {
            // forward distance to the next ending vertex
            let d = ends.iter().map(|&e| (e + n - v) % n).min().expect("non-empty");
            TableauBox::new(1, total - d)
        })
        .collect();
    Ok(FixedPoint { boxes })
}

/// Single-block encoding of a fixed point as its ending set.
pub fn encode_ending_set(inst: &Instance, p: &FixedPoint) -> Result<Vec<u32>, FixpointError> {
    if !inst.is_single_block() {
        return Err(FixpointError::MultiBlock);
    }
    Ok(p.ending_set(inst))
}

/// The meet of two single-block fixed points: union of ending sets.
pub fn fp_meet(inst: &Instance, p: &FixedPoint, q: &FixedPoint) -> Result<FixedPoint, FixpointError> {
    if !inst.is_single_block() {
        return Err(FixpointError::MultiBlock);
    }
    let mut set = p.ending_set(inst);
    set.extend(q.ending_set(inst));
    decode_ending_set(inst, &set)
}

/// For one block of size `N ≥ n`, the isomorphic instance with `N = n`.
pub fn reduce_n(inst: &Instance) -> Result<Instance, FixpointError> {
    if !inst.is_single_block() {
        return Err(FixpointError::MultiBlock);
    }
    if inst.total_dim() >= inst.n() {
        Ok(Instance::new(inst.n(), vec![inst.n()]).expect("valid"))
    } else {
        Ok(inst.clone())
    }
}

/// Transports a fixed point along the canonical bijection of [`reduce_n`]:
/// the ending set is kept.
pub fn transport_single_block(
    from: &Instance,
    to: &Instance,
    p: &FixedPoint,
) -> Result<FixedPoint, FixpointError> {
    decode_ending_set(to, &encode_ending_set(from, p)?)
}

/// The enumerated fixed points of one instance with a lookup index.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    inst: Instance,
    points: Vec<FixedPoint>,
    index: HashMap<FixedPoint, usize>,
}

impl FixedPointSet {
    pub fn new(inst: &Instance) -> Self {
        let points = enumerate_fixed_points(inst);
        let index = points.iter().enumerate().map(|(k, p)| (p.clone(), k)).collect();
        FixedPointSet {
            inst: inst.clone(),
            points,
            index,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &FixedPoint {
        &self.points[k]
    }

    pub fn index_of(&self, p: &FixedPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn parse_point(&self, s: &str) -> Result<usize, FixpointError> {
        let p = FixedPoint::parse(&self.inst, s)?;
        Ok(self.index_of(&p).expect("every valid fixed point is enumerated"))
    }

    pub fn label(&self, k: usize) -> String {
        self.points[k].label(&self.inst)
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let boxes: Vec<String> = self.boxes.iter().map(|b| b.to_string()).collect();
        write!(f, "({})", boxes.join(", "))
    }
}
