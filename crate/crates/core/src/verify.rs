//! Brute-force oracles and invariant checks, kept independent of the fast
//! paths they validate.
//!
//! Fixed points are found by trying every assignment of one box per vertex,
//! and edges by testing every pair of fixed points for a one-dimensional
//! connecting orbit: the span of the two points must be a subrepresentation
//! and the torus must move it through a single character. Neither touches
//! the enumeration by ending sets or the mutation rules. Duality is checked
//! with plain rational-function arithmetic on expanded restrictions.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cohomology::{integrate, verify_kt_basis, CohomologyError, DualBasis, EqClass, Integrator};
use crate::exactalg::{Character, Polynomial};
use crate::fixpoints::FixedPoint;
use crate::gkm::GkmGraph;
use crate::model::{Instance, TableauBox, VertexId};

/// Default cap on the number of candidates an oracle may try.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("oracle needs {needed} candidates, over the budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub item: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn check(&mut self, item: impl FnOnce() -> String, expected: impl ToString, actual: impl ToString) {
        self.checked += 1;
        let (expected, actual) = (expected.to_string(), actual.to_string());
        if expected != actual {
            self.mismatches.push(Mismatch {
                item: item(),
                expected,
                actual,
            });
        }
    }

    /// Appends `other`, keeping items sorted.
    pub fn merge(&mut self, other: OracleReport) {
        self.checked += other.checked;
        self.mismatches.extend(other.mismatches);
        self.mismatches.sort_by(|a, b| a.item.cmp(&b.item));
    }
}

fn budget_check(needed: Option<u64>, budget: u64) -> Result<(), VerifyError> {
    match needed {
        Some(needed) if needed <= budget => Ok(()),
        needed => Err(VerifyError::BudgetExceeded {
            needed: needed.unwrap_or(u64::MAX),
            budget,
        }),
    }
}

/// Every successor-closed assignment of one box per vertex, in
/// lexicographic order of the box lists.
pub fn oracle_fixed_points(inst: &Instance, budget: u64) -> Result<Vec<FixedPoint>, VerifyError> {
    let boxes: Vec<TableauBox> = inst.boxes().collect();
    let n = inst.n() as usize;
    budget_check((boxes.len() as u64).checked_pow(inst.n()), budget)?;
    let mut out = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let choice: Vec<TableauBox> = digits.iter().map(|&d| boxes[d]).collect();
        let closed = (0..n).all(|v| match inst.jmap(choice[v]) {
            None => true,
            Some(next) => next == choice[(v + 1) % n],
        });
        if closed {
            out.push(FixedPoint::new(inst, choice).expect("successor closed"));
        }
        // odometer, last vertex fastest
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < boxes.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Unordered pairs of fixed points (as indices into `points`, smaller
/// first) joined by a one-dimensional torus orbit.
pub fn oracle_edges(
    inst: &Instance,
    points: &[FixedPoint],
    budget: u64,
) -> Result<Vec<(usize, usize)>, VerifyError> {
    let count = points.len() as u64;
    budget_check(Some(count), budget)?;
    let mut out = Vec::new();
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if orbit_connects(inst, &points[a], &points[b]) {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

fn orbit_connects(inst: &Instance, p: &FixedPoint, q: &FixedPoint) -> bool {
    let n = inst.n();
    let span = |v: u32| -> Vec<TableauBox> {
        let (a, b) = (p.at(VertexId(v)), q.at(VertexId(v)));
        if a == b {
            vec![a]
        } else {
            vec![a, b]
        }
    };
    // J ν_v ⊆ ν_{v+1}
    let subrep = (0..n).all(|v| {
        let next = span((v + 1) % n);
        span(v)
            .into_iter()
            .all(|b| inst.jmap(b).is_none_or(|c| next.contains(&c)))
    });
    if !subrep {
        return false;
    }
    let diffs: Vec<Character> = (0..n)
        .map(VertexId)
        .filter(|&v| p.at(v) != q.at(v))
        .map(|v| inst.tweight(q.at(v), v).sub(&inst.tweight(p.at(v), v)))
        .collect();
    character_rank(&diffs) == 1
}

/// Rank of the lattice spanned by `chars`, capped at 2.
fn character_rank(chars: &[Character]) -> usize {
    let mut nonzero = chars.iter().filter(|c| !c.is_zero());
    let Some(first) = nonzero.next() else {
        return 0;
    };
    let line = first.normalized().1;
    if nonzero.all(|c| c.normalized().1 == line) {
        1
    } else {
        2
    }
}

/// Brute-force fixed points against the graph's.
pub fn check_fixed_points(graph: &GkmGraph, budget: u64) -> Result<OracleReport, VerifyError> {
    let inst = graph.instance();
    let found = oracle_fixed_points(inst, budget)?;
    let oracle: BTreeSet<&[TableauBox]> = found.iter().map(FixedPoint::boxes).collect();
    let fast: BTreeSet<&[TableauBox]> = graph.points().points().iter().map(FixedPoint::boxes).collect();
    let mut report = OracleReport::default();
    report.check(|| "fixed point count".into(), oracle.len(), graph.points().len());
    for p in oracle.union(&fast) {
        report.check(
            || format!("fixed point {p:?}"),
            oracle.contains(p),
            fast.contains(p),
        );
    }
    Ok(report)
}

/// Orbit-oracle edges against the mutation-generated ones, as unordered
/// pairs.
pub fn check_edges(graph: &GkmGraph, budget: u64) -> Result<OracleReport, VerifyError> {
    let inst = graph.instance();
    let points = graph.points();
    let oracle: BTreeSet<(usize, usize)> = oracle_edges(inst, points.points(), budget)?.into_iter().collect();
    let fast: BTreeSet<(usize, usize)> = graph
        .edges()
        .iter()
        .map(|e| (e.src.min(e.dst), e.src.max(e.dst)))
        .collect();
    let mut report = OracleReport::default();
    report.check(|| "edge count".into(), oracle.len(), graph.edges().len());
    for &(a, b) in oracle.union(&fast) {
        report.check(
            || format!("edge {} -- {}", points.label(a), points.label(b)),
            oracle.contains(&(a, b)),
            fast.contains(&(a, b)),
        );
    }
    Ok(report)
}

/// How `check_abbv` sums localization formulas. Both are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbbvMethod {
    /// Rational functions of the expanded restrictions, term by term;
    /// shares nothing with the basis solver.
    RationalFunction,
    /// Sums over label-factored restrictions, nested along the product
    /// structure of each closed cell ([`Integrator`]).
    Factored,
}

/// Instances up to this many fixed points are checked with
/// [`AbbvMethod::RationalFunction`] by default.
pub const RATFUN_LIMIT: usize = 64;

/// `∫_{C̄_y} p^x = δ_{x,y}` for every pair.
pub fn check_abbv(graph: &GkmGraph) -> Result<OracleReport, VerifyError> {
    let basis = DualBasis::compute(graph)?;
    let method = if graph.points().len() <= RATFUN_LIMIT {
        AbbvMethod::RationalFunction
    } else {
        AbbvMethod::Factored
    };
    Ok(check_abbv_classes(graph, basis.classes(), method)?)
}

/// The duality check on given candidate classes.
pub fn check_abbv_classes(
    graph: &GkmGraph,
    classes: &[EqClass],
    method: AbbvMethod,
) -> Result<OracleReport, CohomologyError> {
    let points = graph.points();
    let fast = (method == AbbvMethod::Factored).then(|| Integrator::new(graph));
    let mut report = OracleReport::default();
    for (x, c) in classes.iter().enumerate() {
        let values: Vec<String> = match &fast {
            Some(integrator) => integrator
                .integrate_all(c, 0..points.len())
                .into_iter()
                .map(|v| v.map_or_else(|| "not a polynomial".to_string(), |p| p.to_string()))
                .collect(),
            None => (0..points.len())
                .map(|y| {
                    let v = integrate(graph, c, y)?;
                    Ok(match v.as_polynomial() {
                        Some(p) => p.to_string(),
                        None => v.to_string(),
                    })
                })
                .collect::<Result<_, CohomologyError>>()?,
        };
        for (y, actual) in values.into_iter().enumerate() {
            let expected = if x == y {
                Polynomial::one()
            } else {
                Polynomial::zero()
            };
            report.check(
                || format!("integral of p^{} over C({})", points.label(x), points.label(y)),
                expected,
                actual,
            );
        }
    }
    Ok(report)
}

/// Out-degrees against cell dimensions, tangent counts of every closed cell,
/// reachability against the cell order, and non-proportional labels at
/// every point.
pub fn check_graph_invariants(graph: &GkmGraph) -> OracleReport {
    let poset = graph.poset();
    let points = graph.points();
    let len = points.len();
    let mut report = OracleReport::default();
    for p in 0..len {
        report.check(
            || format!("out-degree of {}", points.label(p)),
            poset.dim(p),
            graph.out_edges(p).count(),
        );
    }
    for y in 0..len {
        for z in poset.closure_points(y) {
            let incident = graph
                .in_edges(z)
                .filter(|e| poset.contains(y, e.src))
                .chain(graph.out_edges(z).filter(|e| poset.contains(y, e.dst)))
                .count();
            report.check(
                || format!("edges at {} inside C({})", points.label(z), points.label(y)),
                poset.dim(y),
                incident,
            );
        }
    }
    // oriented paths y → … → x, latest points first so targets are done
    let mut reach = vec![Vec::<bool>::new(); len];
    for p in poset.inner_first() {
        let mut row = vec![false; len];
        row[p] = true;
        for e in graph.out_edges(p) {
            for (k, &r) in reach[e.dst].iter().enumerate() {
                row[k] |= r;
            }
        }
        reach[p] = row;
    }
    for (y, from_y) in reach.iter().enumerate() {
        for (x, &reachable) in from_y.iter().enumerate() {
            if reachable {
                report.check(
                    || {
                        format!(
                            "path {} -> {} within the cell order",
                            points.label(y),
                            points.label(x)
                        )
                    },
                    true,
                    poset.precedes(y, x),
                );
            }
        }
    }
    for p in 0..len {
        let labels: Vec<Character> = graph
            .in_edges(p)
            .chain(graph.out_edges(p))
            .map(|e| e.label.normalized().1)
            .collect();
        let distinct: BTreeSet<&Character> = labels.iter().collect();
        report.check(
            || format!("pairwise independent labels at {}", points.label(p)),
            labels.len(),
            distinct.len(),
        );
    }
    report
}

/// Up to `max` pairs `(x, y)` with `x ≤ y`: all of them when there are few
/// enough, otherwise the pairs among evenly spaced points of the canonical
/// order, which always include the first and the last point.
pub fn sample_pairs(points: usize, max: usize) -> Vec<(usize, usize)> {
    let all = points * (points + 1) / 2;
    let picks: Vec<usize> = if all <= max {
        (0..points).collect()
    } else {
        // k(k + 1)/2 ≤ max
        let k = (((8 * max + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
        let k = k.clamp(1, points);
        let mut picks: Vec<usize> = (0..k).map(|j| j * (points - 1) / (k - 1).max(1)).collect();
        picks.dedup();
        picks
    };
    let mut pairs = Vec::new();
    for (a, &x) in picks.iter().enumerate() {
        for &y in &picks[a..] {
            pairs.push((x, y));
        }
    }
    pairs
}

/// Properties of a computed basis: the Knutson–Tao conditions (support,
/// homogeneity, diagonal, GKM divisibility), `deg p^x = dim C_x`, the
/// cyclic symmetry `p^{τx} = τ·p^x`, and for the given pairs that the
/// structure constants are homogeneous polynomials of degree
/// `dim x + dim y − dim z`, symmetric in `x, y`, and re-expand the product
/// pointwise.
pub fn check_basis_properties(graph: &GkmGraph, basis: &DualBasis, pairs: &[(usize, usize)]) -> OracleReport {
    let points = graph.points();
    let poset = graph.poset();
    let mut report = OracleReport::default();
    let kt = verify_kt_basis(graph, basis.classes());
    report.checked += kt.classes;
    for f in kt.failures {
        report.mismatches.push(Mismatch {
            item: format!(
                "p^{} at {}",
                points.label(f.class),
                f.point.map_or("some edge".to_string(), |p| points.label(p))
            ),
            expected: "Knutson-Tao conditions".into(),
            actual: format!("{:?} fails", f.condition),
        });
    }
    for x in 0..basis.len() {
        let degrees: BTreeSet<Option<u32>> = basis
            .class(x)
            .restrictions()
            .iter()
            .filter(|r| !r.is_zero())
            .map(|r| r.degree())
            .collect();
        report.check(
            || format!("degree of p^{}", points.label(x)),
            format!("{{Some({})}}", poset.dim(x)),
            format!("{degrees:?}"),
        );
        let tx = graph.rotate_index(x, 1);
        report.check(
            || format!("tau p^{} = p^{}", points.label(x), points.label(tx)),
            true,
            &basis.class(x).tau_act(graph, 1) == basis.class(tx),
        );
    }
    for &(x, y) in pairs {
        let item = |what: &str| format!("{what} of p^{} p^{}", points.label(x), points.label(y));
        let c = match basis.structure_constants_factored(graph, x, y) {
            Ok(c) => c,
            Err(e) => {
                report.check(|| item("structure constants"), "polynomials", e);
                continue;
            }
        };
        for (z, cz) in &c {
            let expected = (poset.dim(x) + poset.dim(y)).checked_sub(poset.dim(*z));
            let actual = cz.is_homogeneous().then(|| cz.degree()).flatten();
            report.check(
                || format!("{} at {}", item("degree of c"), points.label(*z)),
                format!("{expected:?}"),
                format!("{actual:?}"),
            );
        }
        if x != y {
            let swapped = basis
                .structure_constants_factored(graph, y, x)
                .map_err(|e| e.to_string());
            report.check(|| item("symmetry"), true, swapped.as_ref() == Ok(&c));
        }
        let bad = basis.product_mismatches(graph, x, y, &c);
        report.check(|| item("re-expansion"), "[]", format!("{bad:?}"));
    }
    report
}

/// Which checks `run_suite` performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fixpoints,
    Edges,
    Abbv,
    Graph,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub instance: String,
    pub suite: Suite,
    pub passed: bool,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
}

pub fn run_suite(graph: &GkmGraph, suite: Suite, budget: u64) -> Result<SuiteReport, VerifyError> {
    let mut report = OracleReport::default();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    if wants(Suite::Fixpoints) {
        report.merge(check_fixed_points(graph, budget)?);
    }
    if wants(Suite::Edges) {
        report.merge(check_edges(graph, budget)?);
    }
    if wants(Suite::Graph) {
        report.merge(check_graph_invariants(graph));
    }
    if wants(Suite::Abbv) {
        report.merge(check_abbv(graph)?);
    }
    Ok(SuiteReport {
        instance: graph.instance().to_string(),
        suite,
        passed: report.passed(),
        checked: report.checked,
        mismatches: report.mismatches,
    })
}
