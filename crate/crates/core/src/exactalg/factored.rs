use std::fmt;

use super::character::Character;
use super::polynomial::{product_of_linear, Polynomial};
use super::rational::Rational;

/// A polynomial written as `coeff · Π ℓ^k · rest` with distinct primitive
/// linear forms `ℓ` (normalized as in [`Character::normalized`]).
///
/// Localization produces products of edge labels almost exclusively, and in
/// this form they multiply, shift and compare without expansion. `rest`
/// holds whatever part has not been split into linear factors; it is `1`
/// for every class the library computes itself.
#[derive(Clone, Debug)]
pub struct Factored {
    coeff: Rational,
    factors: Vec<(Character, u32)>,
    rest: Polynomial,
}

impl Factored {
    pub fn zero() -> Self {
        Factored::constant(Rational::zero())
    }

    pub fn one() -> Self {
        Factored::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Factored {
            coeff: c,
            factors: Vec::new(),
            rest: Polynomial::one(),
        }
    }

    /// Wraps `p` without looking for linear factors.
    pub fn from_polynomial(p: Polynomial) -> Self {
        match p.as_constant() {
            Some(c) => Factored::constant(c),
            None => Factored {
                coeff: Rational::one(),
                factors: Vec::new(),
                rest: p,
            },
        }
    }

    /// `Π weights`. Panics on a zero weight.
    pub fn from_linear<'a, I: IntoIterator<Item = &'a Character>>(weights: I) -> Self {
        Factored::from_parts(
            Rational::one(),
            weights.into_iter().map(|w| (w.clone(), 1)),
            Polynomial::one(),
        )
    }

    /// `coeff · Π ℓ^k · rest` for arbitrary nonzero linear forms `ℓ`.
    pub fn from_parts<I: IntoIterator<Item = (Character, u32)>>(
        coeff: Rational,
        factors: I,
        rest: Polynomial,
    ) -> Self {
        if coeff.is_zero() || rest.is_zero() {
            return Factored::zero();
        }
        let mut coeff = coeff;
        let mut list: Vec<(Character, u32)> = Vec::new();
        for (w, k) in factors {
            if k == 0 {
                continue;
            }
            let (scale, prim) = w.normalized();
            assert!(scale != 0, "zero linear factor");
            for _ in 0..k {
                coeff = &coeff * &Rational::from_int(scale);
            }
            list.push((prim, k));
        }
        list.sort();
        let mut merged: Vec<(Character, u32)> = Vec::with_capacity(list.len());
        for (w, k) in list {
            match merged.last_mut() {
                Some(last) if last.0 == w => last.1 += k,
                _ => merged.push((w, k)),
            }
        }
        let mut out = Factored {
            coeff,
            factors: merged,
            rest: Polynomial::one(),
        };
        if let Some(c) = rest.as_constant() {
            out.coeff = &out.coeff * &c;
        } else {
            out.rest = rest;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn factors(&self) -> &[(Character, u32)] {
        &self.factors
    }

    pub fn rest(&self) -> &Polynomial {
        &self.rest
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let linear: u32 = self.factors.iter().map(|f| f.1).sum();
        Some(linear + self.rest.degree().unwrap_or(0))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rest.is_homogeneous()
    }

    pub fn expand(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let linear = product_of_linear(
            self.factors
                .iter()
                .flat_map(|(w, k)| std::iter::repeat_n(w, *k as usize)),
        );
        linear.mul(&self.rest).scale(&self.coeff)
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        if self.is_zero() || other.is_zero() {
            return Factored::zero();
        }
        let rest = if other.rest.is_one() {
            self.rest.clone()
        } else if self.rest.is_one() {
            other.rest.clone()
        } else {
            self.rest.mul(&other.rest)
        };
        Factored::from_parts(
            &self.coeff * &other.coeff,
            self.factors.iter().chain(&other.factors).cloned(),
            rest,
        )
    }

    pub fn neg(&self) -> Factored {
        Factored {
            coeff: -&self.coeff,
            ..self.clone()
        }
    }

    /// Every `t[r][s]` becomes `t[(r + steps) mod n][s]`.
    pub fn rho_shift(&self, steps: i64, n: u32) -> Factored {
        Factored::from_parts(
            self.coeff.clone(),
            self.factors.iter().map(|(w, k)| (w.rho_shift(steps, n), *k)),
            self.rest.rho_shift(steps, n),
        )
    }

    /// Whether `w` divides `self − other`, i.e. both agree on the
    /// hyperplane `w = 0`. Products of linear forms are compared there by
    /// unique factorization; anything with an unsplit part is expanded.
    pub fn congruent_mod(&self, other: &Factored, w: &Character) -> bool {
        if !self.rest.is_one() || !other.rest.is_one() {
            return self.expand().sub(&other.expand()).exact_div_linear(w).is_ok();
        }
        self.restrict(w) == other.restrict(w)
    }

    /// The restriction to `w = 0` in factored form.
    fn restrict(&self, w: &Character) -> Factored {
        if self.is_zero() {
            return Factored::zero();
        }
        let (x, c) = w.pivot().expect("nonzero linear form");
        // c · ℓ|_{w=0} = c·ℓ − ℓ_x·w
        let mut coeff = self.coeff.clone();
        let mut list = Vec::with_capacity(self.factors.len());
        for (l, k) in &self.factors {
            let lx = l.coeff(x);
            let restricted = l.scale(c).sub(&w.scale(lx));
            if restricted.is_zero() {
                return Factored::zero();
            }
            for _ in 0..*k {
                coeff = &coeff / &Rational::from_int(c);
            }
            list.push((restricted, *k));
        }
        Factored::from_parts(coeff, list, Polynomial::one())
    }
}

/// Exact equality of the polynomials represented.
impl PartialEq for Factored {
    fn eq(&self, other: &Factored) -> bool {
        if self.rest.is_one() && other.rest.is_one() {
            self.coeff == other.coeff && (self.is_zero() || self.factors == other.factors)
        } else {
            self.expand() == other.expand()
        }
    }
}

impl Eq for Factored {}

impl From<Polynomial> for Factored {
    fn from(p: Polynomial) -> Self {
        Factored::from_polynomial(p)
    }
}

impl From<&Factored> for Polynomial {
    fn from(f: &Factored) -> Self {
        f.expand()
    }
}

/// Prints the product, e.g. `-2*(t0 - t[1][1])^2*(t[0][1] - t[1][2])`.
impl fmt::Display for Factored {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.factors.is_empty() && self.rest.is_one() {
            return write!(f, "{}", self.coeff);
        }
        if self.coeff == -Rational::one() {
            write!(f, "-")?;
        } else if !self.coeff.is_one() {
            parts.push(self.coeff.to_string());
        }
        for (w, k) in &self.factors {
            let base = if w.terms().len() == 1 && w.terms()[0].1 == 1 {
                w.to_string()
            } else {
                format!("({w})")
            };
            parts.push(if *k == 1 { base } else { format!("{base}^{k}") });
        }
        if !self.rest.is_one() {
            parts.push(format!("({})", self.rest));
        }
        write!(f, "{}", parts.join("*"))
    }
}
