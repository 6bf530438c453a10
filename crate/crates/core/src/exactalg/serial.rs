//! JSON form of polynomials: a list of `{coeff: "p/q", monomial: [[var, exp], …]}`
//! with variables named `t0` or `t[r][s]`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::character::Character;
use super::polynomial::{Monomial, Polynomial};
use super::rational::Rational;
use super::var::VarId;
use super::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub monomial: Vec<(String, u32)>,
}

pub type PolyJson = Vec<TermJson>;

impl Polynomial {
    pub fn to_json(&self) -> PolyJson {
        self.terms()
            .iter()
            .map(|(m, c)| TermJson {
                coeff: c.to_fraction_string(),
                monomial: m.exponents().iter().map(|(v, e)| (v.to_string(), *e)).collect(),
            })
            .collect()
    }

    pub fn from_json(terms: &[TermJson]) -> Result<Polynomial, AlgebraError> {
        let mut out = Vec::with_capacity(terms.len());
        for t in terms {
            let c: Rational = t
                .coeff
                .parse()
                .map_err(|e: super::ParseRationalError| AlgebraError::Parse(e.to_string()))?;
            let mut exps = Vec::with_capacity(t.monomial.len());
            for (name, e) in &t.monomial {
                let v: VarId = name
                    .parse()
                    .map_err(|e: super::ParseVarError| AlgebraError::Parse(e.to_string()))?;
                exps.push((v, *e));
            }
            out.push((Monomial::from_exponents(exps), c));
        }
        Ok(Polynomial::from_terms(out))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = PolyJson::deserialize(d)?;
        Polynomial::from_json(&terms).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Character {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_polynomial().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Character {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = Polynomial::deserialize(d)?;
        Character::from_polynomial(&p)
            .ok_or_else(|| serde::de::Error::custom("character must be linear with integer coefficients"))
    }
}
