//! The input datum `(n, Jordan partition)`, the Jordan basis boxes and the two
//! torus weightings.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::exactalg::{Character, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("n must be at least 1")]
    NoVertices,
    #[error("at least one Jordan block is required")]
    NoBlocks,
    #[error("Jordan block sizes must be at least 1")]
    EmptyBlock,
    #[error("Jordan block sizes must be non-increasing, got {0:?}")]
    Unsorted(Vec<u32>),
    #[error("cannot parse instance `{0}` (expected `n=<int>;blocks=<int>[,<int>…]` or JSON)")]
    Syntax(String),
}

/// The cyclic quiver size `n` and the Jordan block sizes `j_1 ≥ … ≥ j_M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    n: u32,
    blocks: Vec<u32>,
}

#[derive(Deserialize)]
struct RawInstance {
    n: u32,
    blocks: Vec<u32>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = InstanceError;
    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        Instance::new(raw.n, raw.blocks)
    }
}

impl Instance {
    pub fn new(n: u32, blocks: Vec<u32>) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::NoVertices);
        }
        if blocks.is_empty() {
            return Err(InstanceError::NoBlocks);
        }
        if blocks.contains(&0) {
            return Err(InstanceError::EmptyBlock);
        }
        if blocks.windows(2).any(|w| w[0] < w[1]) {
            return Err(InstanceError::Unsorted(blocks));
        }
        Ok(Instance { n, blocks })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    /// `M`.
    pub fn num_blocks(&self) -> u32 {
        self.blocks.len() as u32
    }

    /// `N = Σ j_l`.
    pub fn total_dim(&self) -> u32 {
        self.blocks.iter().sum()
    }

    /// `j_l` for a 1-based block index.
    pub fn block_size(&self, l: u32) -> u32 {
        self.blocks[(l - 1) as usize]
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    /// All boxes, block by block.
    pub fn boxes(&self) -> impl Iterator<Item = TableauBox> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, &j)| (1..=j).map(move |i| TableauBox::new(k as u32 + 1, i)))
    }

    pub fn contains(&self, b: TableauBox) -> bool {
        b.l >= 1 && b.l <= self.num_blocks() && b.i >= 1 && b.i <= self.block_size(b.l)
    }

    pub fn vertex(&self, v: i64) -> VertexId {
        VertexId(v.rem_euclid(i64::from(self.n)) as u32)
    }

    /// Distance of a box to the end of its row, `j_l − i`.
    pub fn dist(&self, b: TableauBox) -> u32 {
        self.block_size(b.l) - b.i
    }

    /// C×-weight `l − M·(j_l − i)`.
    pub fn cweight(&self, b: TableauBox) -> i64 {
        i64::from(b.l) - i64::from(self.num_blocks()) * i64::from(self.dist(b))
    }

    /// T-weight of `v_i^l` placed over vertex `v`: `(i−1)·t0 + t[(j_l−i+v) mod n][l]`.
    pub fn tweight(&self, b: TableauBox, v: VertexId) -> Character {
        Character::from_terms([
            (VarId::T0, i64::from(b.i) - 1),
            (
                VarId::rot(i64::from(self.dist(b)) + i64::from(v.0), b.l, self.n),
                1,
            ),
        ])
    }

    /// The twisted lexicographic order, normatively the order of C×-weights.
    pub fn box_compare(&self, a: TableauBox, b: TableauBox) -> Ordering {
        self.cweight(a).cmp(&self.cweight(b))
    }

    /// The Jordan map on basis vectors: `v_i^l ↦ v_{i+1}^l`, or `None` at the
    /// end of a row.
    pub fn jmap(&self, b: TableauBox) -> Option<TableauBox> {
        (b.i < self.block_size(b.l)).then(|| TableauBox::new(b.l, b.i + 1))
    }

    /// Number of boxes strictly above `b`.
    pub fn count_greater(&self, b: TableauBox) -> u32 {
        let w = self.cweight(b);
        self.boxes().filter(|&c| self.cweight(c) > w).count() as u32
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "n={};blocks={}", self.n, blocks.join(","))
    }
}

impl FromStr for Instance {
    type Err = InstanceError;

    /// Accepts the inline form `n=3;blocks=3,2` or the JSON object form.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.starts_with('{') {
            let raw: RawInstance =
                serde_json::from_str(t).map_err(|_| InstanceError::Syntax(s.to_string()))?;
            return Instance::new(raw.n, raw.blocks);
        }
        let mut n = None;
        let mut blocks = None;
        for field in t.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| InstanceError::Syntax(s.to_string()))?;
            match key.trim() {
                "n" => {
                    n = Some(
                        value
                            .trim()
                            .parse::<u32>()
                            .map_err(|_| InstanceError::Syntax(s.to_string()))?,
                    )
                }
                "blocks" => {
                    let parsed: Result<Vec<u32>, _> =
                        value.split(',').map(|b| b.trim().parse::<u32>()).collect();
                    blocks = Some(parsed.map_err(|_| InstanceError::Syntax(s.to_string()))?);
                }
                _ => return Err(InstanceError::Syntax(s.to_string())),
            }
        }
        match (n, blocks) {
            (Some(n), Some(blocks)) => Instance::new(n, blocks),
            _ => Err(InstanceError::Syntax(s.to_string())),
        }
    }
}

/// The Jordan basis vector `v_i^l`, i.e. the box in row `l` at position `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct TableauBox {
    pub l: u32,
    pub i: u32,
}

impl TableauBox {
    pub const fn new(l: u32, i: u32) -> Self {
        TableauBox { l, i }
    }
}

impl From<(u32, u32)> for TableauBox {
    fn from((l, i): (u32, u32)) -> Self {
        TableauBox { l, i }
    }
}

impl From<TableauBox> for (u32, u32) {
    fn from(b: TableauBox) -> Self {
        (b.l, b.i)
    }
}

impl fmt::Display for TableauBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}^{}", self.i, self.l)
    }
}

/// A vertex of the cyclic quiver, stored reduced mod n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::chi_pair;

    fn inst(n: u32, blocks: &[u32]) -> Instance {
        Instance::new(n, blocks.to_vec()).unwrap()
    }

    #[test]
    fn rejects_malformed_instances() {
        assert_eq!(Instance::new(0, vec![1]), Err(InstanceError::NoVertices));
        assert_eq!(Instance::new(1, vec![]), Err(InstanceError::NoBlocks));
        assert_eq!(
            Instance::new(2, vec![1, 3]),
            Err(InstanceError::Unsorted(vec![1, 3]))
        );
        assert!("n=3;blocks=2,3".parse::<Instance>().is_err());
        assert!("n=0;blocks=3".parse::<Instance>().is_err());
        assert!("blocks=3".parse::<Instance>().is_err());
    }

    #[test]
    fn parses_inline_and_json() {
        let a: Instance = "n=3;blocks=3,2".parse().unwrap();
        let b: Instance = r#"{"n": 3, "blocks": [3, 2]}"#.parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "n=3;blocks=3,2");
        assert!(serde_json::from_str::<Instance>(r#"{"n":1,"blocks":[1,2]}"#).is_err());
    }

    #[test]
    fn cweight_table() {
        let i = inst(3, &[4, 3, 3, 2]);
        let expected = [
            ((1, 4), 1),
            ((1, 3), -3),
            ((1, 2), -7),
            ((1, 1), -11),
            ((2, 3), 2),
            ((2, 2), -2),
            ((2, 1), -6),
            ((3, 3), 3),
            ((3, 2), -1),
            ((3, 1), -5),
            ((4, 2), 4),
            ((4, 1), 0),
        ];
        for ((l, k), w) in expected {
            assert_eq!(i.cweight(TableauBox::new(l, k)), w, "v_{k}^{l}");
        }
        assert_eq!(inst(1, &[1]).cweight(TableauBox::new(1, 1)), 1);
    }

    #[test]
    fn tweight_examples() {
        let i = inst(3, &[3, 2]);
        let t = |r: i64, s: u32| VarId::rot(r, s, 3);
        let ch = |terms: &[(VarId, i64)]| Character::from_terms(terms.iter().copied());
        let v0 = VertexId(0);
        assert_eq!(i.tweight(TableauBox::new(1, 1), v0), ch(&[(t(2, 1), 1)]));
        assert_eq!(
            i.tweight(TableauBox::new(1, 2), v0),
            ch(&[(VarId::T0, 1), (t(1, 1), 1)])
        );
        assert_eq!(
            i.tweight(TableauBox::new(1, 3), v0),
            ch(&[(VarId::T0, 2), (t(0, 1), 1)])
        );
        assert_eq!(i.tweight(TableauBox::new(2, 1), v0), ch(&[(t(1, 2), 1)]));
        assert_eq!(
            i.tweight(TableauBox::new(2, 2), v0),
            ch(&[(VarId::T0, 1), (t(0, 2), 1)])
        );
        let v1 = VertexId(1);
        assert_eq!(i.tweight(TableauBox::new(1, 1), v1), ch(&[(t(0, 1), 1)]));
        assert_eq!(
            i.tweight(TableauBox::new(2, 2), v1),
            ch(&[(VarId::T0, 1), (t(1, 2), 1)])
        );
        assert_eq!(i.tweight(TableauBox::new(2, 1), VertexId(2)), ch(&[(t(0, 2), 1)]));
    }

    #[test]
    fn chi_recovers_cweight() {
        let i = inst(3, &[4, 3, 3, 2]);
        for b in i.boxes() {
            for v in 0..3 {
                assert_eq!(chi_pair(&i.tweight(b, VertexId(v)), &i), i.cweight(b));
            }
        }
    }

    #[test]
    fn box_order_examples() {
        let i = inst(1, &[3]);
        let v = |k| TableauBox::new(1, k);
        assert_eq!(i.box_compare(v(1), v(2)), Ordering::Less);
        assert_eq!(i.box_compare(v(2), v(3)), Ordering::Less);
        assert_eq!(i.box_compare(v(2), v(2)), Ordering::Equal);
        let j = inst(1, &[3, 3]);
        assert_eq!(
            j.box_compare(TableauBox::new(1, 3), TableauBox::new(2, 3)),
            Ordering::Less
        );
    }

    #[test]
    fn jmap_examples() {
        let i = inst(1, &[3]);
        assert_eq!(i.jmap(TableauBox::new(1, 1)), Some(TableauBox::new(1, 2)));
        assert_eq!(i.jmap(TableauBox::new(1, 3)), None);
        assert_eq!(inst(1, &[2, 1]).jmap(TableauBox::new(2, 1)), None);
    }

    #[test]
    fn count_greater_examples() {
        let i = inst(1, &[3]);
        assert_eq!(i.count_greater(TableauBox::new(1, 1)), 2);
        assert_eq!(i.count_greater(TableauBox::new(1, 3)), 0);
        assert_eq!(inst(1, &[4, 3, 3, 2]).count_greater(TableauBox::new(4, 2)), 0);
    }
}
