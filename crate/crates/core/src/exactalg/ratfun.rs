use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;

use super::character::Character;
use super::polynomial::{product_of_linear, Monomial, Polynomial};
use super::rational::Rational;
use super::var::VarId;
use super::AlgebraError;

/// A quotient of polynomials.
///
/// The denominator is kept as `residual · Π factors^k` where each factor is a
/// primitive linear character with positive leading coefficient. Every
/// denominator met in localization is a product of tangent weights, so in
/// practice `residual` stays 1; reduction is by trial division against the
/// stored factors only, never by a general gcd.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    residual: Polynomial,
    factors: BTreeMap<Character, u32>,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        if let Some(c) = den.as_constant() {
            return Ok(RationalFunction::from_polynomial(num.scale(&c.recip())));
        }
        if den.is_homogeneous() && den.degree() == Some(1) {
            if let Some(w) = Character::from_polynomial(&den) {
                return RationalFunction::from_factors(num, [w]);
            }
        }
        Ok(RationalFunction::normalize(num, den, BTreeMap::new()))
    }

    pub fn from_polynomial(num: Polynomial) -> Self {
        RationalFunction {
            num,
            residual: Polynomial::one(),
            factors: BTreeMap::new(),
        }
    }

    /// `num / Π factors`.
    pub fn from_factors<I>(num: Polynomial, factors: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator,
        I::Item: Borrow<Character>,
    {
        let mut scale = 1i64;
        let mut map = BTreeMap::new();
        let mut big_scale = Rational::one();
        for w in factors {
            let (k, prim) = w.borrow().normalized();
            if k == 0 {
                return Err(AlgebraError::ZeroDenominator);
            }
            match scale.checked_mul(k) {
                Some(s) => scale = s,
                None => {
                    big_scale = &big_scale * &Rational::from_int(scale);
                    scale = k;
                }
            }
            *map.entry(prim).or_insert(0) += 1;
        }
        let total = &big_scale * &Rational::from_int(scale);
        let num = if total.is_one() {
            num
        } else {
            num.scale(&total.recip())
        };
        Ok(RationalFunction::normalize(num, Polynomial::one(), map))
    }

    pub fn zero() -> Self {
        RationalFunction::from_polynomial(Polynomial::zero())
    }

    pub fn one() -> Self {
        RationalFunction::from_polynomial(Polynomial::one())
    }

    fn normalize(
        mut num: Polynomial,
        mut residual: Polynomial,
        mut factors: BTreeMap<Character, u32>,
    ) -> Self {
        if num.is_zero() {
            return RationalFunction::zero();
        }
        if let Some(c) = residual.as_constant() {
            if !c.is_one() {
                num = num.scale(&c.recip());
            }
            residual = Polynomial::one();
        } else if residual.len() == 1 {
            // monomial content
            let (m, c) = residual.terms()[0].clone();
            let common = common_monomial_divisor(&num, &m);
            if !common.is_one() {
                num = divide_monomial(&num, &common);
                residual = Polynomial::from_terms([(divide_mono(&m, &common), c)]);
            }
            if let Some(c) = residual.as_constant() {
                num = num.scale(&c.recip());
                residual = Polynomial::one();
            }
        }
        for (w, k) in factors.iter_mut() {
            while *k > 0 && could_divide(&num, w) {
                match num.exact_div_linear(w) {
                    Ok(q) => {
                        num = q;
                        *k -= 1;
                    }
                    Err(_) => break,
                }
            }
        }
        factors.retain(|_, k| *k > 0);
        RationalFunction {
            num,
            residual,
            factors,
        }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    /// The denominator, expanded.
    pub fn denominator(&self) -> Polynomial {
        self.residual.mul(&product_of_linear(self.factor_list().iter()))
    }

    fn factor_list(&self) -> Vec<Character> {
        self.factors
            .iter()
            .flat_map(|(w, &k)| std::iter::repeat_n(w.clone(), k as usize))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial value when the denominator has fully cancelled.
    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        if self.factors.is_empty() && self.residual.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (lcm, a_extra, b_extra) = lcm_factors(&self.factors, &other.factors);
        let a = self.num.mul(&product_of_linear(a_extra.iter()));
        let b = other.num.mul(&product_of_linear(b_extra.iter()));
        if self.residual == other.residual {
            RationalFunction::normalize(a.add(&b), self.residual.clone(), lcm)
        } else {
            let num = a.mul(&other.residual).add(&b.mul(&self.residual));
            RationalFunction::normalize(num, self.residual.mul(&other.residual), lcm)
        }
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            residual: self.residual.clone(),
            factors: self.factors.clone(),
        }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero();
        }
        let mut factors = self.factors.clone();
        for (w, k) in &other.factors {
            *factors.entry(w.clone()).or_insert(0) += k;
        }
        RationalFunction::normalize(
            self.num.mul(&other.num),
            self.residual.mul(&other.residual),
            factors,
        )
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        RationalFunction::normalize(self.num.mul(p), self.residual.clone(), self.factors.clone())
    }

    /// Decides `a = b` by cross-multiplication.
    pub fn rat_eq(&self, other: &RationalFunction) -> bool {
        let (_, a_extra, b_extra) = lcm_factors(&self.factors, &other.factors);
        let lhs = self
            .num
            .mul(&product_of_linear(a_extra.iter()))
            .mul(&other.residual);
        let rhs = other
            .num
            .mul(&product_of_linear(b_extra.iter()))
            .mul(&self.residual);
        lhs == rhs
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.rat_eq(other)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_polynomial() {
            Some(p) => write!(f, "{p}"),
            None => {
                write!(f, "({})/(", self.num)?;
                let mut first = true;
                if !self.residual.is_one() {
                    write!(f, "({})", self.residual)?;
                    first = false;
                }
                for (w, k) in &self.factors {
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    write!(f, "({w})")?;
                    if *k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
                write!(f, ")")
            }
        }
    }
}

fn lcm_factors(
    a: &BTreeMap<Character, u32>,
    b: &BTreeMap<Character, u32>,
) -> (BTreeMap<Character, u32>, Vec<Character>, Vec<Character>) {
    let mut lcm = a.clone();
    for (w, &k) in b {
        let e = lcm.entry(w.clone()).or_insert(0);
        *e = (*e).max(k);
    }
    let extra = |own: &BTreeMap<Character, u32>| -> Vec<Character> {
        lcm.iter()
            .flat_map(|(w, &k)| {
                let have = own.get(w).copied().unwrap_or(0);
                std::iter::repeat_n(w.clone(), (k - have) as usize)
            })
            .collect()
    };
    let (ea, eb) = (extra(a), extra(b));
    (lcm, ea, eb)
}

/// Cheap necessary condition for `w | p`: p vanishes at a fixed point of the
/// hyperplane `w = 0`. A nonzero value proves non-divisibility.
fn could_divide(p: &Polynomial, w: &Character) -> bool {
    if p.len() < 24 {
        return true;
    }
    let Some((x, cx)) = w.pivot() else {
        return false;
    };
    let value = |v: VarId| -> Rational {
        let h = match v {
            VarId::T0 => 7,
            VarId::Rot { s, r } => 11 + 13 * i64::from(s) + 29 * i64::from(r) * i64::from(r + 3),
        };
        Rational::from_int(h % 97 + 2)
    };
    let rest: Rational = w
        .terms()
        .iter()
        .filter(|t| t.0 != x)
        .fold(Rational::zero(), |acc, &(v, c)| {
            &acc + &(&Rational::from_int(c) * &value(v))
        });
    let xv = &(-&rest) / &Rational::from_int(cx);
    p.evaluate(|v| if v == x { xv.clone() } else { value(v) })
        .is_zero()
}

fn common_monomial_divisor(p: &Polynomial, m: &Monomial) -> Monomial {
    let mut exps: Vec<(VarId, u32)> = m.exponents().to_vec();
    for (t, _) in p.terms() {
        for e in exps.iter_mut() {
            e.1 = e.1.min(t.exponent(e.0));
        }
    }
    Monomial::from_exponents(exps)
}

fn divide_mono(m: &Monomial, d: &Monomial) -> Monomial {
    Monomial::from_exponents(m.exponents().iter().map(|&(v, e)| (v, e - d.exponent(v))))
}

fn divide_monomial(p: &Polynomial, d: &Monomial) -> Polynomial {
    Polynomial::from_terms(p.terms().iter().map(|(m, c)| (divide_mono(m, d), c.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(r: i64) -> Polynomial {
        Polynomial::var(VarId::rot(r, 1, 3))
    }

    fn t0() -> Polynomial {
        Polynomial::var(VarId::T0)
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalFunction::new(t0(), Polynomial::zero()).unwrap_err(),
            AlgebraError::ZeroDenominator
        );
        assert!(RationalFunction::from_factors(t0(), [Character::zero()]).is_err());
    }

    #[test]
    fn additive_inverse() {
        let a = RationalFunction::new(t0(), v(0)).unwrap();
        let b = RationalFunction::new(t0().neg(), v(0)).unwrap();
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn reciprocal_product_is_one() {
        let a = RationalFunction::new(t0(), v(0)).unwrap();
        let b = RationalFunction::new(v(0), t0()).unwrap();
        let p = a.mul(&b);
        assert!(p.rat_eq(&RationalFunction::one()));
        assert_eq!(p.as_polynomial(), Some(&Polynomial::one()));
    }

    #[test]
    fn negated_denominators_cancel() {
        // 1/(t2 - t0 - t1) + 1/(t1 + t0 - t2) with t1, t2 renamed
        let d1 = v(2).sub(&t0()).sub(&v(1));
        let d2 = v(1).add(&t0()).sub(&v(2));
        let a = RationalFunction::new(Polynomial::one(), d1).unwrap();
        let b = RationalFunction::new(Polynomial::one(), d2).unwrap();
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn residual_denominators() {
        let q = v(0).mul(&v(0)).add(&t0());
        let a = RationalFunction::new(t0(), q.clone()).unwrap();
        let b = RationalFunction::new(
            t0().scale(&Rational::from_int(2)),
            q.scale(&Rational::from_int(2)),
        )
        .unwrap();
        assert!(a.rat_eq(&b));
        assert!(a.sub(&b).is_zero());
        let c = RationalFunction::new(t0().mul(&v(1)), t0().mul(&v(0))).unwrap();
        assert!(c.rat_eq(&RationalFunction::new(v(1), v(0)).unwrap()));
    }

    #[test]
    fn cancellation_leaves_polynomial() {
        let w = Character::from_terms([(VarId::T0, 2), (VarId::rot(1, 1, 3), -2)]);
        let num = w.to_polynomial().mul(&v(2));
        let r = RationalFunction::from_factors(num, [w]).unwrap();
        assert_eq!(r.as_polynomial(), Some(&v(2)));
    }
}
