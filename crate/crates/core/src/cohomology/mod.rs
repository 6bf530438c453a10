//! Equivariant cohomology by localization: the basis `{p^x}` dual to the
//! fundamental classes of the closed cells, the Knutson–Tao checks, the
//! structure constants and the cyclic symmetry.
//!
//! Classes are tuples of polynomials indexed like the fixed points of the
//! graph they belong to. Integration over a closed cell uses
//!
//! ```text
//! ∫_{C̄_y} c = Σ_{z ∈ C̄_y} c|_z / e(T_z C̄_y)
//! ```
//!
//! and the dual basis is solved from `∫_{C̄_y} p^x = δ_{x,y}` one point at a
//! time. The system is triangular for the cell order `⪯` generated by closure
//! membership, so `p^x` lives on `{y : y ⪯ x}`; `p^x|_x = e(T_x C̄_x)`, and
//! for the other such `y`, taking the points of a closed cell before the
//! cell's own point,
//!
//! ```text
//! p^x|_y = −e(T_y C̄_y) · Σ_{s ∈ C̄_y, s ≠ y} p^x|_s / e(T_s C̄_y).
//! ```
//!
//! Membership alone would not do: with several blocks, `C̄_y` can contain a
//! point `s` with `s ⪯ x` while `x ∉ C̄_y`.

mod localize;

use std::sync::OnceLock;

use serde::Serialize;

use crate::cells::BitMatrix;
use crate::exactalg::{AlgebraError, Character, Factored, Polynomial, Rational, RationalFunction};
use crate::gkm::GkmGraph;
use localize::{Fraction, LabelTable, LocalSum, Multiset, Product};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error("localization sum for {what} at {point} is not a polynomial")]
    NotPolynomial { what: String, point: String },
    #[error("class has {got} restrictions but the graph has {expected} fixed points")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A class given by its restrictions to the fixed points, kept in factored
/// form; the classes computed here are products of edge labels pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqClass {
    restrictions: Vec<Factored>,
}

impl EqClass {
    pub fn new(restrictions: Vec<Polynomial>) -> Self {
        EqClass::from_factored(restrictions.into_iter().map(Factored::from).collect())
    }

    pub fn from_factored(restrictions: Vec<Factored>) -> Self {
        EqClass { restrictions }
    }

    pub fn zero(points: usize) -> Self {
        EqClass::from_factored(vec![Factored::zero(); points])
    }

    pub fn one(points: usize) -> Self {
        EqClass::from_factored(vec![Factored::one(); points])
    }

    pub fn len(&self) -> usize {
        self.restrictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.restrictions.is_empty()
    }

    pub fn at(&self, p: usize) -> &Factored {
        &self.restrictions[p]
    }

    /// The restriction to `p`, expanded.
    pub fn polynomial(&self, p: usize) -> Polynomial {
        self.restrictions[p].expand()
    }

    pub fn restrictions(&self) -> &[Factored] {
        &self.restrictions
    }

    pub fn set(&mut self, p: usize, value: impl Into<Factored>) {
        self.restrictions[p] = value.into();
    }

    /// Points with a nonzero restriction.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&p| !self.restrictions[p].is_zero())
    }

    pub fn mul(&self, other: &EqClass) -> EqClass {
        EqClass::from_factored(
            self.restrictions
                .iter()
                .zip(&other.restrictions)
                .map(|(a, b)| a.mul(b))
                .collect(),
        )
    }

    /// `(τ^steps · c)|_p = ρ^steps(c|_{rotate(p, −steps)})`, so that the
    /// class dual to `rotate(x, 1)` is `τ · p^x`.
    pub fn tau_act(&self, graph: &GkmGraph, steps: i64) -> EqClass {
        let n = graph.instance().n();
        EqClass::from_factored(
            (0..self.len())
                .map(|p| self.restrictions[graph.rotate_index(p, -steps)].rho_shift(steps, n))
                .collect(),
        )
    }

    /// For every edge `p → q`, `label` divides `c|_p − c|_q`; returns the
    /// offending edge indices.
    pub fn gkm_violations(&self, graph: &GkmGraph) -> Vec<usize> {
        graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| !self.restrictions[e.src].congruent_mod(&self.restrictions[e.dst], &e.label))
            .map(|(k, _)| k)
            .collect()
    }
}

/// `∫_{C̄_y} c` with general rational-function arithmetic on expanded
/// restrictions. Slow but independent of the label bookkeeping below.
pub fn integrate(graph: &GkmGraph, c: &EqClass, y: usize) -> Result<RationalFunction, CohomologyError> {
    let poset = graph.poset();
    let mut acc = RationalFunction::zero();
    for z in poset.closure_points(y) {
        if c.at(z).is_zero() {
            continue;
        }
        let weights = graph.tangent_weights(z, y).expect("z lies in the closed cell");
        acc = acc.add(&RationalFunction::from_factors(c.polynomial(z), &weights)?);
    }
    Ok(acc)
}

/// A closed cell prepared for iterated summation.
///
/// `C̄_y` is a product over the movable parts of `y`, and every tangent
/// direction at a fixed point moves a single part. Grouping the points by
/// their boxes part by part turns `Σ_s c|_s / e(T_s C̄_y)` into nested sums,
/// `Σ_{s_1} 1/e_1(s_1) Σ_{s_2} 1/e_2(s_2) … c|_s`, whose inner results are
/// polynomials for GKM classes. When the split does not apply the cell is
/// treated as a single level, which is the plain sum.
#[derive(Debug)]
struct Cell {
    /// Points of `C̄_y`, sorted by `keys`.
    points: Vec<usize>,
    levels: usize,
    /// Per point and level, an id for the boxes on that level's part.
    keys: Vec<u32>,
    /// Per point and level, `e_j = scale · Π labels`.
    weights: Vec<(Rational, Multiset)>,
    /// `e(T_y C̄_y)`.
    own: (Rational, Multiset),
}

impl Cell {
    fn new(graph: &GkmGraph, table: &LabelTable, y: usize) -> Self {
        let inst = graph.instance();
        let poset = graph.poset();
        let boxes = |p: usize| graph.points().point(p).boxes();
        let points: Vec<usize> = poset.closure_points(y).collect();
        let own = table.factor_weights(&graph.tangent_weights(y, y).expect("y ∈ C̄_y"));

        let mut part_of = vec![usize::MAX; inst.n() as usize];
        let parts = graph.points().point(y).movable_parts(inst);
        for (j, part) in parts.iter().enumerate() {
            for r in 0..=part.len {
                part_of[part.vertex(inst, r).0 as usize] = j;
            }
        }
        // per point, the tangent weights moving each part
        let mut split: Vec<Vec<Vec<Character>>> = Vec::with_capacity(points.len());
        for &s in &points {
            let mut per_part = vec![Vec::new(); parts.len()];
            let edges = graph
                .in_edges(s)
                .filter(|e| poset.contains(y, e.src))
                .map(|e| (e.src, e.label.clone()))
                .chain(
                    graph
                        .out_edges(s)
                        .filter(|e| poset.contains(y, e.dst))
                        .map(|e| (e.dst, e.label.neg())),
                );
            for (other, w) in edges {
                let mut moved = boxes(s)
                    .iter()
                    .zip(boxes(other))
                    .enumerate()
                    .filter(|(_, (a, b))| a != b)
                    .map(|(v, _)| part_of[v]);
                let j = moved.next().expect("edges join distinct points");
                if j == usize::MAX || moved.any(|k| k != j) {
                    return Cell::flat(table, points, own, |s| {
                        graph.tangent_weights(s, y).expect("s ∈ C̄_y")
                    });
                }
                per_part[j].push(w);
            }
            split.push(per_part);
        }

        let levels = parts.len();
        let mut ids: Vec<std::collections::HashMap<Vec<crate::model::TableauBox>, u32>> =
            vec![Default::default(); levels];
        let mut order: Vec<(Vec<u32>, usize)> = points
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let key = parts
                    .iter()
                    .enumerate()
                    .map(|(j, part)| {
                        let on_part: Vec<_> = (0..=part.len)
                            .map(|r| boxes(s)[part.vertex(inst, r).0 as usize])
                            .collect();
                        let next = ids[j].len() as u32;
                        *ids[j].entry(on_part).or_insert(next)
                    })
                    .collect();
                (key, k)
            })
            .collect();
        order.sort();
        let cell = Cell {
            points: order.iter().map(|o| points[o.1]).collect(),
            levels,
            keys: order.iter().flat_map(|o| o.0.iter().copied()).collect(),
            weights: order
                .iter()
                .flat_map(|o| split[o.1].iter().map(|w| table.factor_weights(w)))
                .collect(),
            own,
        };
        // e_j must be constant on every group sharing the first j + 1 keys
        for k in 1..cell.points.len() {
            for j in 0..levels {
                if cell.key(k, j) != cell.key(k - 1, j) {
                    break;
                }
                if cell.weight(k, j) != cell.weight(k - 1, j) {
                    let own = cell.own;
                    return Cell::flat(table, points, own, |s| {
                        graph.tangent_weights(s, y).expect("s ∈ C̄_y")
                    });
                }
            }
        }
        cell
    }

    fn flat(
        table: &LabelTable,
        points: Vec<usize>,
        own: (Rational, Multiset),
        weights: impl Fn(usize) -> Vec<Character>,
    ) -> Self {
        Cell {
            keys: (0..points.len() as u32).collect(),
            weights: points
                .iter()
                .map(|&s| table.factor_weights(&weights(s)))
                .collect(),
            points,
            levels: 1,
            own,
        }
    }

    fn key(&self, k: usize, j: usize) -> u32 {
        self.keys[k * self.levels + j]
    }

    fn weight(&self, k: usize, j: usize) -> &(Rational, Multiset) {
        &self.weights[k * self.levels + j]
    }

    /// `Σ_s c|_s / e(T_s C̄_y)`; `None` when it vanishes.
    fn sum(&self, table: &LabelTable, c: &[Product]) -> Option<Fraction> {
        self.level_sum(table, c, 0..self.points.len(), 0)
    }

    fn level_sum(
        &self,
        table: &LabelTable,
        c: &[Product],
        range: std::ops::Range<usize>,
        j: usize,
    ) -> Option<Fraction> {
        if j == self.levels {
            let mut sum = LocalSum::default();
            for k in range {
                sum.push(&c[self.points[k]], &Rational::one(), &Vec::new());
            }
            return sum.total(table);
        }
        let mut sum = LocalSum::default();
        let mut start = range.start;
        while start < range.end {
            let mut end = start + 1;
            while end < range.end && self.key(end, j) == self.key(start, j) {
                end += 1;
            }
            if let Some(inner) = self.level_sum(table, c, start..end, j + 1) {
                let (scale, labels) = self.weight(start, j);
                sum.push_fraction(inner, scale, labels);
            }
            start = end;
        }
        sum.total(table)
    }
}

/// Tangent data of every closed cell, in label form.
#[derive(Debug)]
struct Localizer {
    table: LabelTable,
    cells: Vec<Cell>,
}

impl Localizer {
    fn new(graph: &GkmGraph) -> Self {
        let table = LabelTable::new(graph);
        let cells = (0..graph.points().len())
            .map(|y| Cell::new(graph, &table, y))
            .collect();
        Localizer { table, cells }
    }

    fn solve(&self, graph: &GkmGraph, x: usize) -> Result<EqClass, CohomologyError> {
        let poset = graph.poset();
        let mut class = vec![Product::zero(); poset.len()];
        let (scale, labels) = &self.cells[x].own;
        class[x] = Product::from_labels(scale.clone(), labels.clone());
        for y in poset.inner_first() {
            if y == x || !poset.precedes(y, x) {
                continue;
            }
            // class[y] is still zero, so this is the sum over s ≠ y
            let cell = &self.cells[y];
            let Some(rest) = cell.sum(&self.table, &class) else {
                continue;
            };
            let (scale, labels) = &cell.own;
            class[y] = rest.into_product(&self.table, -scale, labels).ok_or_else(|| {
                CohomologyError::NotPolynomial {
                    what: format!("p^{}", graph.points().label(x)),
                    point: graph.points().label(y),
                }
            })?;
        }
        Ok(EqClass::from_factored(
            class.iter().map(|p| self.table.to_factored(p)).collect(),
        ))
    }

    /// `∫_{C̄_y} c`, or `None` if it is not a polynomial.
    fn integrate(&self, c: &[Product], y: usize) -> Option<Polynomial> {
        match self.cells[y].sum(&self.table, c) {
            None => Some(Polynomial::zero()),
            Some(f) => f
                .into_product(&self.table, Rational::one(), &Vec::new())
                .map(|p| self.table.to_factored(&p).expand()),
        }
    }

    fn products(&self, c: &EqClass) -> Vec<Product> {
        c.restrictions()
            .iter()
            .map(|f| self.table.to_product(f))
            .collect()
    }
}

/// Exact integration over closed cells by summing in label-factored form.
/// Agrees with [`integrate`] whenever the latter returns a polynomial, and
/// is much faster on classes that are products of edge labels.
#[derive(Debug)]
pub struct Integrator<'g> {
    graph: &'g GkmGraph,
    loc: Localizer,
}

impl<'g> Integrator<'g> {
    pub fn new(graph: &'g GkmGraph) -> Self {
        Integrator {
            graph,
            loc: Localizer::new(graph),
        }
    }

    /// `∫_{C̄_y} c`; `None` when the sum is not a polynomial.
    pub fn integrate(&self, c: &EqClass, y: usize) -> Option<Polynomial> {
        self.integrate_all(c, std::iter::once(y)).pop().flatten()
    }

    /// `∫_{C̄_y} c` for each `y`, converting `c` once.
    pub fn integrate_all(&self, c: &EqClass, ys: impl IntoIterator<Item = usize>) -> Vec<Option<Polynomial>> {
        debug_assert_eq!(c.len(), self.graph.points().len());
        let products = self.loc.products(c);
        ys.into_iter().map(|y| self.loc.integrate(&products, y)).collect()
    }
}

/// The class dual to the closed cell of `x`.
pub fn dual_basis_class(graph: &GkmGraph, x: usize) -> Result<EqClass, CohomologyError> {
    Localizer::new(graph).solve(graph, x)
}

/// The whole dual basis, indexed like the fixed points.
#[derive(Debug)]
pub struct DualBasis {
    classes: Vec<EqClass>,
    loc: OnceLock<Localizer>,
}

impl DualBasis {
    pub fn compute(graph: &GkmGraph) -> Result<Self, CohomologyError> {
        let loc = Localizer::new(graph);
        let classes = (0..graph.points().len())
            .map(|x| loc.solve(graph, x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DualBasis {
            classes,
            loc: OnceLock::from(loc),
        })
    }

    pub fn from_classes(classes: Vec<EqClass>) -> Self {
        DualBasis {
            classes,
            loc: OnceLock::new(),
        }
    }

    pub fn class(&self, x: usize) -> &EqClass {
        &self.classes[x]
    }

    pub fn classes(&self) -> &[EqClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn localizer(&self, graph: &GkmGraph) -> &Localizer {
        self.loc.get_or_init(|| Localizer::new(graph))
    }

    /// `c^z_{x,y} = ∫_{C̄_z} p^x · p^y`; nonzero constants only, ascending
    /// by `z`.
    pub fn structure_constants(
        &self,
        graph: &GkmGraph,
        x: usize,
        y: usize,
    ) -> Result<Vec<(usize, Polynomial)>, CohomologyError> {
        Ok(self
            .structure_constants_factored(graph, x, y)?
            .into_iter()
            .map(|(z, c)| (z, c.expand()))
            .collect())
    }

    /// [`DualBasis::structure_constants`] before expansion; they are
    /// usually products of labels, and much smaller this way.
    pub fn structure_constants_factored(
        &self,
        graph: &GkmGraph,
        x: usize,
        y: usize,
    ) -> Result<Vec<(usize, Factored)>, CohomologyError> {
        let loc = self.localizer(graph);
        let product = loc.products(&self.classes[x].mul(&self.classes[y]));
        let mut out = Vec::new();
        for z in 0..product.len() {
            let cell = &loc.cells[z];
            if cell.points.iter().all(|&s| product[s].is_zero()) {
                continue;
            }
            let Some(sum) = cell.sum(&loc.table, &product) else {
                continue;
            };
            let c = sum
                .into_product(&loc.table, Rational::one(), &Vec::new())
                .ok_or_else(|| CohomologyError::NotPolynomial {
                    what: format!("c^z_{{{},{}}}", graph.points().label(x), graph.points().label(y)),
                    point: graph.points().label(z),
                })?;
            out.push((z, loc.table.to_factored(&c)));
        }
        Ok(out)
    }

    /// Points `s` where `p^x|_s · p^y|_s ≠ Σ_z c_z · p^z|_s`. The sums are
    /// formed over label-factored terms, expanding only the factors the
    /// terms do not share, so this stays cheap where full expansion is not.
    pub fn product_mismatches(
        &self,
        graph: &GkmGraph,
        x: usize,
        y: usize,
        constants: &[(usize, Factored)],
    ) -> Vec<usize> {
        let loc = self.localizer(graph);
        let lhs = self.classes[x].mul(&self.classes[y]);
        let terms: Vec<(&Factored, &EqClass)> =
            constants.iter().map(|(z, c)| (c, &self.classes[*z])).collect();
        (0..lhs.len())
            .filter(|&s| {
                let mut sum = LocalSum::default();
                let one = Rational::one();
                sum.push(&loc.table.to_product(&lhs.at(s).neg()), &one, &Vec::new());
                for (c, class) in &terms {
                    sum.push(&loc.table.to_product(&c.mul(class.at(s))), &one, &Vec::new());
                }
                sum.total(&loc.table).is_some()
            })
            .collect()
    }

    /// Writes `c` in the basis by peeling off the highest points of its
    /// support; `None` if a coefficient fails to be a polynomial or a
    /// residue remains.
    pub fn expand(&self, graph: &GkmGraph, c: &EqClass) -> Option<Vec<(usize, Polynomial)>> {
        let poset = graph.poset();
        let mut rest: Vec<Polynomial> = (0..c.len()).map(|p| c.polynomial(p)).collect();
        let mut out = Vec::new();
        for z in poset.inner_first() {
            if rest[z].is_zero() {
                continue;
            }
            let own = graph.tangent_weights(z, z).expect("z ∈ C̄_z");
            let mut coeff = std::mem::take(&mut rest[z]);
            for w in &own {
                coeff = coeff.exact_div_linear(w).ok()?;
            }
            let basis = self.class(z);
            for s in basis.support() {
                if s != z {
                    rest[s] = rest[s].sub(&coeff.mul(&basis.polynomial(s)));
                }
            }
            out.push((z, coeff));
        }
        out.sort_by_key(|e| e.0);
        rest.iter().all(Polynomial::is_zero).then_some(out)
    }
}

/// Which Knutson–Tao condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KtCondition {
    /// Nonzero restriction at a point with no oriented path to the class's point.
    Support,
    /// A restriction of the wrong degree or not homogeneous.
    Homogeneity,
    /// The diagonal restriction is not the product of out-going weights.
    Diagonal,
    /// A label fails to divide the difference across its edge.
    GkmDivisibility,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KtFailure {
    pub class: usize,
    pub point: Option<usize>,
    pub condition: KtCondition,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct KtReport {
    pub classes: usize,
    pub failures: Vec<KtFailure>,
}

impl KtReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Oriented-path reachability `reach[y][x]`: a path `y → … → x` exists.
pub fn reachability(graph: &GkmGraph) -> Vec<Vec<bool>> {
    let n = graph.points().len();
    let mut reach = BitMatrix::new(n);
    // edges go up the coordinate-wise order, so targets are finished first
    for p in graph.poset().inner_first() {
        reach.set(p, p);
        for e in graph.out_edges(p) {
            for q in reach.row_ones(e.dst).collect::<Vec<_>>() {
                reach.set(p, q);
            }
        }
    }
    (0..n)
        .map(|y| (0..n).map(|x| reach.get(y, x)).collect())
        .collect()
}

/// Checks one candidate class per fixed point against the Knutson–Tao
/// conditions and GKM divisibility.
pub fn verify_kt_basis(graph: &GkmGraph, classes: &[EqClass]) -> KtReport {
    let reach = reachability(graph);
    let mut report = KtReport {
        classes: classes.len(),
        failures: Vec::new(),
    };
    for (x, c) in classes.iter().enumerate() {
        let mut fail = |point, condition| {
            report.failures.push(KtFailure {
                class: x,
                point,
                condition,
            })
        };
        let diagonal: Vec<Character> = graph.out_edges(x).map(|e| e.label.neg()).collect();
        let degree = diagonal.len() as u32;
        if c.at(x) != &Factored::from_linear(&diagonal) {
            fail(Some(x), KtCondition::Diagonal);
        }
        for (y, (r, from_y)) in c.restrictions().iter().zip(&reach).enumerate() {
            if r.is_zero() {
                continue;
            }
            if !from_y[x] {
                fail(Some(y), KtCondition::Support);
            }
            if !r.is_homogeneous() || r.degree() != Some(degree) {
                fail(Some(y), KtCondition::Homogeneity);
            }
        }
        if !c.gkm_violations(graph).is_empty() {
            fail(None, KtCondition::GkmDivisibility);
        }
    }
    report
}
