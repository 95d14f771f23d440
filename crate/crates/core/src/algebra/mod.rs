//! Exact arithmetic kernel: rationals, sparse polynomials, rational
//! functions and fraction-free linear algebra over them.

pub mod gcd;
pub mod matrix;
pub mod poly;
pub mod ratfn;
pub mod rational;

pub use gcd::{gcd, lcm};
pub use matrix::SquareMatrix;
pub use poly::{Monomial, Poly, SparsePoly, Var};
pub use ratfn::{FactoredSum, RatFn};
pub use rational::Rational;
