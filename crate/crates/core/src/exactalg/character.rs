use std::fmt;

use num_integer::Integer;

use super::polynomial::{Monomial, Polynomial};
use super::rational::Rational;
use super::var::VarId;
use crate::model::Instance;

/// An additive torus character: an integer combination of the variables.
///
/// Stored sparse and sorted by variable, without zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Character {
    coeffs: Vec<(VarId, i64)>,
}

impl Character {
    pub fn zero() -> Self {
        Character::default()
    }

    pub fn var(v: VarId) -> Self {
        Character { coeffs: vec![(v, 1)] }
    }

    pub fn from_terms<I: IntoIterator<Item = (VarId, i64)>>(it: I) -> Self {
        let mut coeffs: Vec<(VarId, i64)> = it.into_iter().collect();
        coeffs.sort_unstable_by_key(|c| c.0);
        let mut merged: Vec<(VarId, i64)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|c| c.1 != 0);
        Character { coeffs: merged }
    }

    pub fn terms(&self) -> &[(VarId, i64)] {
        &self.coeffs
    }

    pub fn coeff(&self, v: VarId) -> i64 {
        self.coeffs.iter().find(|c| c.0 == v).map(|c| c.1).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Character) -> Character {
        Character::from_terms(self.coeffs.iter().chain(other.coeffs.iter()).copied())
    }

    pub fn sub(&self, other: &Character) -> Character {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Character {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Character {
        Character::from_terms(self.coeffs.iter().map(|&(v, c)| (v, c * k)))
    }

    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_terms(
            self.coeffs
                .iter()
                .map(|&(v, c)| (Monomial::var(v), Rational::from_int(c))),
        )
    }

    /// Reads a homogeneous degree-1 polynomial with integer coefficients.
    pub fn from_polynomial(p: &Polynomial) -> Option<Character> {
        let mut coeffs = Vec::new();
        for (m, c) in p.terms() {
            match m.exponents() {
                [(v, 1)] => coeffs.push((*v, c.to_i64()?)),
                _ => return None,
            }
        }
        Some(Character::from_terms(coeffs))
    }

    /// The variable used as the division pivot: the first one with a unit
    /// coefficient, else the first one.
    pub fn pivot(&self) -> Option<(VarId, i64)> {
        self.coeffs
            .iter()
            .find(|c| c.1.abs() == 1)
            .or_else(|| self.coeffs.first())
            .copied()
    }

    pub fn without(&self, v: VarId) -> Character {
        Character {
            coeffs: self.coeffs.iter().copied().filter(|c| c.0 != v).collect(),
        }
    }

    /// Splits `self = scale * primitive` where `primitive` has coprime
    /// coefficients and a positive leading coefficient. Zero maps to `(0, 0)`.
    pub fn normalized(&self) -> (i64, Character) {
        let Some(first) = self.coeffs.first() else {
            return (0, Character::zero());
        };
        let g = self.coeffs.iter().fold(0i64, |g, c| g.gcd(&c.1));
        let scale = if first.1 < 0 { -g } else { g };
        (
            scale,
            Character {
                coeffs: self.coeffs.iter().map(|&(v, c)| (v, c / scale)).collect(),
            },
        )
    }

    /// Rational proportionality (both nonzero and on one line).
    pub fn is_proportional(&self, other: &Character) -> bool {
        !self.is_zero() && !other.is_zero() && self.normalized().1 == other.normalized().1
    }

    pub fn rho_shift(&self, steps: i64, n: u32) -> Character {
        Character::from_terms(self.coeffs.iter().map(|&(v, c)| (v.shifted(steps, n), c)))
    }
}

/// Pairs a character with the cocharacter recovering the C×-action:
/// `t0 ↦ M` and `t[r][k] ↦ k − M·j_k + M`.
pub fn chi_pair(w: &Character, inst: &Instance) -> i64 {
    let m = inst.num_blocks() as i64;
    w.terms()
        .iter()
        .map(|&(v, c)| {
            let value = match v {
                VarId::T0 => m,
                VarId::Rot { s, .. } => {
                    let jk = i64::from(inst.block_size(s));
                    i64::from(s) - m * jk + m
                }
            };
            c * value
        })
        .sum()
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let w = Character::from_terms([(VarId::T0, -4), (VarId::rot(0, 1, 2), 2)]);
        let (k, p) = w.normalized();
        assert_eq!(k, -2);
        assert_eq!(p.terms(), &[(VarId::T0, 2), (VarId::rot(0, 1, 2), -1)]);
        assert_eq!(p.scale(k), w);
        assert!(w.is_proportional(&p.neg()));
        assert!(!w.is_proportional(&Character::var(VarId::T0)));
    }

    #[test]
    fn chi_examples() {
        let inst = Instance::new(3, vec![3]).unwrap();
        assert_eq!(chi_pair(&Character::var(VarId::T0), &inst), 1);
        for r in 0..3 {
            assert_eq!(chi_pair(&Character::var(VarId::rot(r, 1, 3)), &inst), -1);
        }
    }

    #[test]
    fn polynomial_round_trip() {
        let w = Character::from_terms([(VarId::T0, 3), (VarId::rot(2, 2, 3), -1)]);
        assert_eq!(Character::from_polynomial(&w.to_polynomial()), Some(w));
        assert_eq!(
            Character::from_polynomial(&Polynomial::var(VarId::T0).pow(2)),
            None
        );
    }
}
