//! Exact arithmetic over the rationals in the torus variables.

mod character;
mod factored;
mod polynomial;
mod ratfun;
mod rational;
mod serial;
mod var;

pub use character::{chi_pair, Character};
pub use factored::Factored;
pub use polynomial::{product_of_linear, Monomial, Polynomial};
pub use ratfun::RationalFunction;
pub(crate) use rational::mul_mod;
pub use rational::{ParseRationalError, Rational};
pub use serial::{PolyJson, TermJson};
pub use var::{ParseVarError, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("polynomial is not divisible by the given linear form")]
    NotDivisible,
    #[error("division by the zero character")]
    ZeroDivisor,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed polynomial: {0}")]
    Parse(String),
}
