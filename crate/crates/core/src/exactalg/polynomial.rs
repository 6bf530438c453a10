use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use super::character::Character;
use super::rational::{mul_mod, Rational};
use super::var::VarId;
use super::AlgebraError;

/// A monomial as a sparse exponent vector sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    degree: u32,
    exps: SmallVec<[(VarId, u32); 4]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: VarId) -> Self {
        Monomial::from_exponents([(v, 1)])
    }

    /// Builds a monomial; repeated variables have their exponents added.
    pub fn from_exponents<I: IntoIterator<Item = (VarId, u32)>>(it: I) -> Self {
        let mut exps: SmallVec<[(VarId, u32); 4]> = it.into_iter().filter(|e| e.1 > 0).collect();
        exps.sort_unstable_by_key(|e| e.0);
        let mut merged: SmallVec<[(VarId, u32); 4]> = SmallVec::new();
        for (v, e) in exps {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => merged.push((v, e)),
            }
        }
        let degree = merged.iter().map(|e| e.1).sum();
        Monomial { degree, exps: merged }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exponents(&self) -> &[(VarId, u32)] {
        &self.exps
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.exps.iter().find(|e| e.0 == v).map(|e| e.1).unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = SmallVec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, b) = (self.exps[i], other.exps[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    exps.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    exps.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    /// Removes `v` entirely, returning its exponent.
    fn split_off(&self, v: VarId) -> (u32, Monomial) {
        match self.exps.iter().position(|e| e.0 == v) {
            None => (0, self.clone()),
            Some(pos) => {
                let e = self.exps[pos].1;
                let mut exps = self.exps.clone();
                exps.remove(pos);
                (
                    e,
                    Monomial {
                        degree: self.degree - e,
                        exps,
                    },
                )
            }
        }
    }

    fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Monomial {
        Monomial::from_exponents(self.exps.iter().map(|&(v, e)| (f(v), e)))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher degree first, then the larger exponent on
    /// the earliest variable wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (a, b) in self.exps.iter().zip(other.exps.iter()) {
                if a.0 != b.0 {
                    // the side carrying the earlier variable is larger
                    return b.0.cmp(&a.0);
                }
                if a.1 != b.1 {
                    return a.1.cmp(&b.1);
                }
            }
            self.exps.len().cmp(&other.exps.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.exps.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with exact rational coefficients.
///
/// Terms are kept sorted in decreasing graded-lex order with no zero
/// coefficients, so derived equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Polynomial::zero()
        } else {
            Polynomial {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(v: VarId) -> Self {
        Polynomial {
            terms: vec![(Monomial::var(v), Rational::one())],
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        for (m, c) in it {
            match acc.get_mut(&m) {
                Some(slot) => *slot = &*slot + &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Polynomial::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has degree ≤ 0.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => self.terms.iter().all(|t| t.0.degree() == m.degree()),
        }
    }

    pub fn variables(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self
            .terms
            .iter()
            .flat_map(|t| t.0.exponents().iter().map(|e| e.0))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.merge(other, true)
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let rhs = |c: &Rational| if negate { -c } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                Ordering::Greater => {
                    terms.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push((b.0.clone(), rhs(&b.1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a.1 - &b.1 } else { &a.1 + &b.1 };
                    if !c.is_zero() {
                        terms.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend(self.terms[i..].iter().cloned());
        terms.extend(other.terms[j..].iter().map(|t| (t.0.clone(), rhs(&t.1))));
        Polynomial { terms }
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by a single term; monomial orders are multiplicative so the
    /// result stays sorted.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(a, ac)| (a.mul(m), ac * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.is_empty() {
            return Polynomial::zero();
        }
        if small.terms.len() <= 8 {
            let mut acc = Polynomial::zero();
            for (m, c) in &small.terms {
                acc = acc.add(&big.mul_term(m, c));
            }
            return acc;
        }
        let mut acc: HashMap<Monomial, Rational> =
            HashMap::with_capacity(small.terms.len() * big.terms.len() / 2);
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(slot) => *slot = &*slot + &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Polynomial::from_map(acc)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Replaces every variable through `f`.
    pub fn map_vars(&self, f: impl Fn(VarId) -> VarId) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.map_vars(&f), c.clone())))
    }

    /// Every `t[r][s]` becomes `t[(r + steps) mod n][s]`; `t0` is fixed.
    pub fn rho_shift(&self, steps: i64, n: u32) -> Polynomial {
        if steps.rem_euclid(i64::from(n)) == 0 {
            return self.clone();
        }
        self.map_vars(|v| v.shifted(steps, n))
    }

    /// Exact quotient by a nonzero linear form, or `NotDivisible`.
    pub fn exact_div_linear(&self, w: &Character) -> Result<Polynomial, AlgebraError> {
        let (x, cx) = w.pivot().ok_or(AlgebraError::ZeroDivisor)?;
        if self.is_zero() {
            return Ok(Polynomial::zero());
        }
        let rest = w.without(x).to_polynomial();
        let cx = Rational::from_int(cx);

        // p = Σ p_e x^e, slices stay sorted after removing x^e
        let mut slices: Vec<Vec<(Monomial, Rational)>> = Vec::new();
        for (m, c) in &self.terms {
            let (e, m0) = m.split_off(x);
            let e = e as usize;
            if slices.len() <= e {
                slices.resize_with(e + 1, Vec::new);
            }
            slices[e].push((m0, c.clone()));
        }
        let top = slices.len() - 1;
        if top == 0 {
            return Err(AlgebraError::NotDivisible);
        }
        let slices: Vec<Polynomial> = slices.into_iter().map(|terms| Polynomial { terms }).collect();

        // p_e = cx * q_{e-1} + rest * q_e, solved from the top slice down
        let inv = cx.recip();
        let mut quotient: Vec<Polynomial> = vec![Polynomial::zero(); top];
        let mut prev = Polynomial::zero();
        for e in (1..=top).rev() {
            let q = slices[e].sub(&rest.mul(&prev)).scale(&inv);
            quotient[e - 1] = q.clone();
            prev = q;
        }
        if slices[0] != rest.mul(&prev) {
            return Err(AlgebraError::NotDivisible);
        }
        let mut out = Polynomial::zero();
        for (e, q) in quotient.into_iter().enumerate() {
            if e == 0 {
                out = out.add(&q);
            } else {
                out = out.add(&q.mul_term(&Monomial::from_exponents([(x, e as u32)]), &Rational::one()));
            }
        }
        Ok(out)
    }

    /// Substitutes integer values for all variables (missing ones read as 0).
    /// The value in `Z/p` at the point `value`; `None` if a coefficient has
    /// a denominator divisible by `p`.
    pub fn evaluate_mod(&self, p: u64, value: impl Fn(VarId) -> u64) -> Option<u64> {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = c.residue(p)?;
            for &(v, e) in m.exponents() {
                let x = value(v);
                for _ in 0..e {
                    t = mul_mod(t, x, p);
                }
            }
            acc = (acc + t) % p;
        }
        Some(acc)
    }

    pub fn evaluate(&self, value: impl Fn(VarId) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.exponents() {
                let x = value(v);
                for _ in 0..e {
                    t = &t * &x;
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl From<&Character> for Polynomial {
    fn from(c: &Character) -> Self {
        c.to_polynomial()
    }
}

/// Product of linear forms, expanded.
pub fn product_of_linear<'a, I: IntoIterator<Item = &'a Character>>(factors: I) -> Polynomial {
    let mut acc = Polynomial::one();
    for w in factors {
        acc = acc.mul(&w.to_polynomial());
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t0() -> Polynomial {
        Polynomial::var(VarId::T0)
    }

    fn t(r: i64, s: u32) -> Polynomial {
        Polynomial::var(VarId::rot(r, s, 3))
    }

    #[test]
    fn add_examples() {
        assert!(t0().add(&t0().neg()).is_zero());
        assert_eq!(t(0, 1).add(&t(0, 1)), t(0, 1).scale(&Rational::from_int(2)));
        let a = t(1, 1).add(&t0());
        let b = t(2, 1).sub(&t0());
        assert_eq!(a.add(&b), t(1, 1).add(&t(2, 1)));
    }

    #[test]
    fn mul_examples() {
        assert!(t0().mul(&Polynomial::zero()).is_zero());
        let p = t(2, 1).sub(&t0());
        assert_eq!(p.mul(&Polynomial::one()), p);
        let (a, b) = (t0(), t(0, 1));
        assert_eq!(a.add(&b).mul(&a.sub(&b)), a.mul(&a).sub(&b.mul(&b)));
    }

    #[test]
    fn division_examples() {
        let w = Character::from_terms([(VarId::T0, 1), (VarId::rot(0, 1, 3), -1)]);
        let p = w.to_polynomial().pow(2);
        assert_eq!(p.exact_div_linear(&w).unwrap(), w.to_polynomial());
        assert!(Polynomial::zero().exact_div_linear(&w).unwrap().is_zero());
        let q = t0().mul(&t(0, 1));
        assert_eq!(q.exact_div_linear(&w), Err(AlgebraError::NotDivisible));
        assert_eq!(
            t0().exact_div_linear(&Character::zero()),
            Err(AlgebraError::ZeroDivisor)
        );
        // constants are never divisible by a linear form
        assert_eq!(
            Polynomial::one().exact_div_linear(&w),
            Err(AlgebraError::NotDivisible)
        );
    }

    /// Brute-force: t0*t[0][1] against every quotient a*t0 + b*t[0][1] + c
    /// with small integer coefficients; none reproduces it.
    #[test]
    fn non_divisible_example_has_no_linear_quotient() {
        let w = Character::from_terms([(VarId::T0, 1), (VarId::rot(0, 1, 3), -1)]);
        let target = t0().mul(&t(0, 1));
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    let q = t0()
                        .scale(&Rational::from_int(a))
                        .add(&t(0, 1).scale(&Rational::from_int(b)))
                        .add(&Polynomial::constant(Rational::from_int(c)));
                    assert_ne!(q.mul(&w.to_polynomial()), target);
                }
            }
        }
        // degree bookkeeping: any quotient must be linear homogeneous and the
        // comparison of coefficients gives a = 0, -b = 0, b - a = 1
    }

    #[test]
    fn rho_shift_examples() {
        assert_eq!(t(2, 1).rho_shift(1, 3), t(0, 1));
        for k in -4..5 {
            assert_eq!(t0().rho_shift(k, 3), t0());
        }
        let p = t(2, 1).mul(&t0()).add(&t(1, 2));
        assert_eq!(p.rho_shift(3, 3), p);
    }

    #[test]
    fn display() {
        let p = t(0, 1).sub(&t0().scale(&Rational::from_int(2))).sub(&t(1, 1));
        assert_eq!(p.to_string(), "-2*t0 + t[0][1] - t[1][1]");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(t0().pow(2).add(&Polynomial::one()).to_string(), "t0^2 + 1");
    }
}
