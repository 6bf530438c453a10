//! Localization sums carried out on products of edge labels.
//!
//! Every tangent weight of a closed cell is an edge label up to sign, and the
//! restrictions of the dual classes turn out to be products of labels as
//! well. Inside a sum, values are kept as `coeff · Π label^k · rest`, with `rest`
//! an unfactored polynomial that is almost always `1`. A sum over a closed
//! cell cancels shared factors between numerators and denominators before
//! anything is expanded, so the polynomials that do get expanded stay small.
//! Nothing here relies on the factorization being complete: `rest` absorbs
//! whatever does not split, and every division is checked.

use std::collections::HashMap;

use crate::exactalg::{mul_mod, product_of_linear, Character, Factored, Polynomial, Rational, VarId};
use crate::gkm::GkmGraph;

/// A multiset of label ids, sorted by id.
pub(crate) type Multiset = Vec<(u32, u32)>;

fn ms_add(a: &Multiset, b: &Multiset) -> Multiset {
    merge(a, b, |x, y| x + y)
}

fn ms_max(a: &Multiset, b: &Multiset) -> Multiset {
    merge(a, b, u32::max)
}

fn ms_min(a: &Multiset, b: &Multiset) -> Multiset {
    merge(a, b, u32::min)
}

fn ms_sub(a: &Multiset, b: &Multiset) -> Multiset {
    merge(a, b, u32::saturating_sub)
}

fn merge(a: &Multiset, b: &Multiset, f: impl Fn(u32, u32) -> u32) -> Multiset {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    loop {
        let (id, x, y) = match (a.get(i), b.get(j)) {
            (None, None) => break,
            (Some(&(ia, ka)), Some(&(ib, kb))) if ia == ib => {
                i += 1;
                j += 1;
                (ia, ka, kb)
            }
            (Some(&(ia, ka)), Some(&(ib, _))) if ia < ib => {
                i += 1;
                (ia, ka, 0)
            }
            (Some(&(ia, ka)), None) => {
                i += 1;
                (ia, ka, 0)
            }
            (_, Some(&(ib, kb))) => {
                j += 1;
                (ib, 0, kb)
            }
        };
        let k = f(x, y);
        if k > 0 {
            out.push((id, k));
        }
    }
    out
}

/// The primitive edge labels of one graph, with their expansions.
#[derive(Debug)]
pub(crate) struct LabelTable {
    forms: Vec<Character>,
    polys: Vec<Polynomial>,
    vars: Vec<Vec<VarId>>,
    index: HashMap<Character, u32>,
    /// Per label, a point of its hyperplane, indexed by `slot`.
    hyperplane_points: Vec<Vec<u64>>,
    n: u32,
}

const PRIME: u64 = (1 << 61) - 1;

/// A fixed pseudo-random coordinate for each variable.
fn sample(v: VarId) -> u64 {
    let code = match v {
        VarId::T0 => 0,
        VarId::Rot { s, r } => (u64::from(s) << 32) | u64::from(r + 1),
    };
    // splitmix64
    let mut z = code.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) % PRIME
}

/// Dense position of a variable.
fn slot(v: VarId, n: u32) -> usize {
    match v {
        VarId::T0 => 0,
        VarId::Rot { s, r } => 1 + ((s - 1) * n + r) as usize,
    }
}

/// `sample` with the pivot coordinate moved so that `w` vanishes.
fn hyperplane_point(w: &Character, n: u32, slots: usize) -> Vec<u64> {
    let (pivot, c) = w.pivot().expect("labels are nonzero");
    let mut others = 0u64;
    for &(v, a) in w.terms() {
        if v != pivot {
            let a = Rational::from_int(a).residue(PRIME).expect("small coefficient");
            others = (others + mul_mod(a, sample(v), PRIME)) % PRIME;
        }
    }
    let inv = Rational::new(-1, c).residue(PRIME).expect("small coefficient");
    let mut point = vec![0; slots];
    for (k, x) in point.iter_mut().enumerate() {
        *x = match k {
            0 => sample(VarId::T0),
            _ => sample(VarId::Rot {
                s: (k as u32 - 1) / n + 1,
                r: (k as u32 - 1) % n,
            }),
        };
    }
    point[slot(pivot, n)] = mul_mod(others, inv, PRIME);
    point
}

impl LabelTable {
    pub(crate) fn new(graph: &GkmGraph) -> Self {
        let n = graph.instance().n();
        let slots = 1 + (n * graph.instance().num_blocks()) as usize;
        let mut forms: Vec<Character> = graph.edges().iter().map(|e| e.label.normalized().1).collect();
        forms.sort();
        forms.dedup();
        let index = forms
            .iter()
            .enumerate()
            .map(|(k, w)| (w.clone(), k as u32))
            .collect();
        LabelTable {
            polys: forms.iter().map(Character::to_polynomial).collect(),
            vars: forms
                .iter()
                .map(|w| w.terms().iter().map(|t| t.0).collect())
                .collect(),
            hyperplane_points: forms.iter().map(|w| hyperplane_point(w, n, slots)).collect(),
            n,
            forms,
            index,
        }
    }

    /// `Π weights = scale · Π labels`. Panics on a weight that is not a
    /// multiple of a label, which would mean a malformed graph.
    pub(crate) fn factor_weights(&self, weights: &[Character]) -> (Rational, Multiset) {
        let mut scale = 1i64;
        let mut ids: Vec<u32> = Vec::with_capacity(weights.len());
        for w in weights {
            let (k, prim) = w.normalized();
            scale *= k;
            ids.push(self.index[&prim]);
        }
        (Rational::from_int(scale), to_multiset(ids))
    }

    /// Factors not in the table are multiplied into `rest`.
    pub(crate) fn to_product(&self, f: &Factored) -> Product {
        if f.is_zero() {
            return Product::zero();
        }
        let mut ids = Vec::new();
        let mut rest = f.rest().clone();
        for (w, k) in f.factors() {
            match self.index.get(w) {
                Some(&id) => ids.extend(std::iter::repeat_n(id, *k as usize)),
                None => rest = rest.mul(&product_of_linear(std::iter::repeat_n(w, *k as usize))),
            }
        }
        Product {
            coeff: f.coeff().clone(),
            factors: to_multiset(ids),
            rest,
        }
    }

    pub(crate) fn to_factored(&self, p: &Product) -> Factored {
        if p.is_zero() {
            return Factored::zero();
        }
        Factored::from_parts(
            p.coeff.clone(),
            p.factors
                .iter()
                .map(|&(id, k)| (self.forms[id as usize].clone(), k)),
            p.rest.clone(),
        )
    }

    fn expand(&self, ms: &Multiset) -> Polynomial {
        let mut acc = Polynomial::one();
        for &(id, k) in ms {
            for _ in 0..k {
                acc = acc.mul(&self.polys[id as usize]);
            }
        }
        acc
    }

    /// Divides `p` by every label of `den` that divides it, removing those
    /// from `den`. A label is tried only if `p` vanishes at a fixed point of
    /// its hyperplane modulo a large prime, which is necessary for divisibility.
    fn cancel(&self, mut p: Polynomial, den: &mut Multiset) -> Polynomial {
        let mut kept: Multiset = Vec::with_capacity(den.len());
        for &(id, k) in den.iter() {
            let mut left = k;
            while left > 0 && self.vanishes_on(&p, id) {
                match p.exact_div_linear(&self.forms[id as usize]) {
                    Ok(q) => {
                        p = q;
                        left -= 1;
                    }
                    Err(_) => break,
                }
            }
            if left > 0 {
                kept.push((id, left));
            }
        }
        *den = kept;
        p
    }

    fn vanishes_on(&self, p: &Polynomial, id: u32) -> bool {
        let point = &self.hyperplane_points[id as usize];
        p.evaluate_mod(PRIME, |v| point[slot(v, self.n)])
            .is_none_or(|r| r == 0)
    }

    /// Splits off every label dividing `p`.
    fn split(&self, p: Polynomial) -> (Rational, Multiset, Polynomial) {
        if let Some(c) = p.as_constant() {
            return (c, Vec::new(), Polynomial::one());
        }
        let mut rest = p;
        let mut found: Multiset = Vec::new();
        let mut vars = rest.variables();
        for (id, form_vars) in self.vars.iter().enumerate() {
            if !form_vars.iter().all(|v| vars.binary_search(v).is_ok()) {
                continue;
            }
            let mut k = 0;
            while self.vanishes_on(&rest, id as u32) {
                match rest.exact_div_linear(&self.forms[id]) {
                    Ok(q) => {
                        rest = q;
                        k += 1;
                    }
                    Err(_) => break,
                }
            }
            if k > 0 {
                found.push((id as u32, k));
                if let Some(c) = rest.as_constant() {
                    return (c, found, Polynomial::one());
                }
                vars = rest.variables();
            }
        }
        (Rational::one(), found, rest)
    }
}

fn to_multiset(mut ids: Vec<u32>) -> Multiset {
    ids.sort_unstable();
    let mut ms: Multiset = Vec::with_capacity(ids.len());
    for id in ids {
        match ms.last_mut() {
            Some(last) if last.0 == id => last.1 += 1,
            _ => ms.push((id, 1)),
        }
    }
    ms
}

/// `coeff · Π labels · rest` over a [`LabelTable`]; zero exactly when `coeff` is.
#[derive(Debug, Clone)]
pub(crate) struct Product {
    coeff: Rational,
    factors: Multiset,
    rest: Polynomial,
}

impl Product {
    pub(crate) fn zero() -> Self {
        Product {
            coeff: Rational::zero(),
            factors: Vec::new(),
            rest: Polynomial::one(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub(crate) fn from_labels(scale: Rational, factors: Multiset) -> Self {
        Product {
            coeff: scale,
            factors,
            rest: Polynomial::one(),
        }
    }
}

/// `num / Π den`.
#[derive(Debug, Clone)]
pub(crate) struct Fraction {
    num: Product,
    den: Multiset,
}

/// `Σ_k num_k / (scale_k · Π den_k)`.
#[derive(Debug, Default)]
pub(crate) struct LocalSum {
    terms: Vec<Fraction>,
}

impl LocalSum {
    pub(crate) fn push(&mut self, num: &Product, scale: &Rational, den: &Multiset) {
        if num.is_zero() {
            return;
        }
        let common = ms_min(&num.factors, den);
        self.terms.push(Fraction {
            num: Product {
                coeff: &num.coeff / scale,
                factors: ms_sub(&num.factors, &common),
                rest: num.rest.clone(),
            },
            den: ms_sub(den, &common),
        });
    }

    pub(crate) fn push_fraction(&mut self, f: Fraction, scale: &Rational, den: &Multiset) {
        self.push(&f.num, scale, &ms_add(&f.den, den));
    }

    /// The sum; `None` when it vanishes.
    pub(crate) fn total(self, table: &LabelTable) -> Option<Fraction> {
        tree_sum(table, self.terms)
    }
}

impl Fraction {
    /// `scale · Π mult · self`, or `None` when that is not a polynomial.
    pub(crate) fn into_product(
        self,
        table: &LabelTable,
        scale: Rational,
        mult: &Multiset,
    ) -> Option<Product> {
        let cancel = ms_min(mult, &self.den);
        let den = ms_sub(&self.den, &cancel);
        let mut num = self.num;
        num.coeff = &num.coeff * &scale;
        num.factors = ms_add(&num.factors, &ms_sub(mult, &cancel));
        for &(id, k) in &den {
            for _ in 0..k {
                num.rest = num.rest.exact_div_linear(&table.forms[id as usize]).ok()?;
            }
        }
        let (c, found, rest) = table.split(std::mem::take(&mut num.rest));
        Some(Product {
            coeff: &num.coeff * &c,
            factors: ms_add(&num.factors, &found),
            rest,
        })
    }
}

/// Adds neighbouring terms pairwise, cancelling after every addition. Terms
/// that sit next to each other in the canonical order tend to share most of
/// their denominators, so partial sums stay small.
fn tree_sum(table: &LabelTable, mut terms: Vec<Fraction>) -> Option<Fraction> {
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => {
                    if let Some(s) = add(table, &a, &b) {
                        next.push(s);
                    }
                }
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop()
}

/// `a + b`, or `None` when it vanishes.
fn add(table: &LabelTable, a: &Fraction, b: &Fraction) -> Option<Fraction> {
    let lcm = ms_max(&a.den, &b.den);
    let fa = ms_add(&a.num.factors, &ms_sub(&lcm, &a.den));
    let fb = ms_add(&b.num.factors, &ms_sub(&lcm, &b.den));
    let shared = ms_min(&fa, &fb);
    let part = |f: &Multiset, n: &Product| {
        let mut p = table.expand(&ms_sub(f, &shared));
        if !n.rest.is_one() {
            p = p.mul(&n.rest);
        }
        p.scale(&n.coeff)
    };
    let rest = part(&fa, &a.num).add(&part(&fb, &b.num));
    if rest.is_zero() {
        return None;
    }
    let cancel = ms_min(&shared, &lcm);
    let mut den = ms_sub(&lcm, &cancel);
    let factors = ms_sub(&shared, &cancel);
    let rest = table.cancel(rest, &mut den);
    Some(Fraction {
        num: Product {
            coeff: Rational::one(),
            factors,
            rest,
        },
        den,
    })
}
