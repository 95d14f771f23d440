//! Normalized rational functions over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{SparsePoly, Var};
use super::rational::Rational;
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1` and `den` of leading coefficient 1.
/// Zero is `0/1`. Equal fractions have identical representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: SparsePoly,
    den: SparsePoly,
}

impl RatFn {
    /// Reduces `num / den` to canonical form.
    pub fn new(num: SparsePoly, den: SparsePoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        if let Some(c) = den.constant_value() {
            return Ok(Self::from_poly(num.scale(&c.recip())));
        }
        if let Some(q) = num.div_exact(&den) {
            return Ok(Self::from_poly(q));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Ok(Self::from_coprime(num, den))
    }

    /// Canonical form of a fraction already known to be coprime.
    pub(crate) fn from_coprime(num: SparsePoly, den: SparsePoly) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            return RatFn { num, den };
        }
        let inv = lc.recip();
        RatFn {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_poly(p: SparsePoly) -> Self {
        RatFn {
            num: p,
            den: SparsePoly::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(SparsePoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(SparsePoly::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(SparsePoly::var(v))
    }

    pub fn zero() -> Self {
        Self::from_poly(SparsePoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(SparsePoly::one())
    }

    pub fn numer(&self) -> &SparsePoly {
        &self.num
    }

    pub fn denom(&self) -> &SparsePoly {
        &self.den
    }

    pub fn into_parts(self) -> (SparsePoly, SparsePoly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_poly(&self) -> Option<&SparsePoly> {
        self.den.is_one().then_some(&self.num)
    }

    /// Variables occurring in numerator or denominator, in global order.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.num.vars().iter().chain(self.den.vars()).cloned().collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_coprime(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: u32) -> Self {
        // Powers of coprime polynomials stay coprime.
        Self::from_coprime(self.num.pow(e), self.den.pow(e))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RatFn {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// `∂num·den − num·∂den`: vanishes identically iff the function does not depend on `v`.
    pub fn cleared_partial(&self, v: &Var) -> SparsePoly {
        &(&self.num.derivative(v) * &self.den) - &(&self.num * &self.den.derivative(v))
    }

    /// Substitutes a rational function for a variable.
    pub fn substitute(&self, v: &Var, value: &RatFn) -> Result<Self> {
        let n = substitute_poly(&self.num, v, value)?;
        let d = substitute_poly(&self.den, v, value)?;
        n.checked_div(&d)
    }

    /// Full evaluation at rational values.
    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational> {
        let n = self.num.eval_partial(values);
        let d = self.den.eval_partial(values);
        match (n.constant_value(), d.constant_value()) {
            (Some(n), Some(d)) => {
                if d.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(n / d)
                }
            }
            _ => Err(Error::InvalidArgument(format!(
                "evaluation leaves free variables in {self}"
            ))),
        }
    }

    /// Partial evaluation; the result may still contain variables.
    pub fn eval_partial(&self, values: &BTreeMap<Var, Rational>) -> Result<Self> {
        Self::new(self.num.eval_partial(values), self.den.eval_partial(values))
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let other_num = if negate { -&other.num } else { other.num.clone() };
        if self.den == other.den {
            let num = &self.num + &other_num;
            if self.den.is_one() {
                return Self::from_poly(num);
            }
            return Self::new(num, self.den.clone()).expect("nonzero denominator");
        }
        if self.den.is_one() {
            return Self::from_coprime(&(&self.num * &other.den) + &other_num, other.den.clone());
        }
        if other.den.is_one() {
            return Self::from_coprime(&self.num + &(&other_num * &self.den), self.den.clone());
        }
        // For reduced inputs, gcd(num, den) divides g = gcd(b, d).
        let g = gcd(&self.den, &other.den);
        let bd = self.den.div_exact(&g).expect("gcd divides");
        let dd = other.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &dd) + &(&other_num * &bd);
        let den = &self.den * &dd;
        if num.is_zero() {
            return Self::zero();
        }
        if g.is_one() {
            return Self::from_coprime(num, den);
        }
        let g2 = gcd(&num, &g);
        if g2.is_one() {
            Self::from_coprime(num, den)
        } else {
            Self::from_coprime(
                num.div_exact(&g2).expect("gcd divides"),
                den.div_exact(&g2).expect("gcd divides"),
            )
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(&self.num * &other.num);
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).expect("gcd divides");
        let d2 = other.den.div_exact(&g1).expect("gcd divides");
        let n2 = other.num.div_exact(&g2).expect("gcd divides");
        let d1 = self.den.div_exact(&g2).expect("gcd divides");
        Self::from_coprime(&n1 * &n2, &d1 * &d2)
    }
}

fn substitute_poly(p: &SparsePoly, v: &Var, value: &RatFn) -> Result<RatFn> {
    let coeffs = p.coefficients_in(v);
    let mut acc = RatFn::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * value) + &RatFn::from_poly(c.clone());
    }
    Ok(acc)
}

impl Default for RatFn {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<SparsePoly> for RatFn {
    fn from(p: SparsePoly) -> Self {
        Self::from_poly(p)
    }
}

impl From<Rational> for RatFn {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&RatFn> for &RatFn {
            type Output = RatFn;
            fn $method(self, rhs: &RatFn) -> RatFn {
                $body(self, rhs)
            }
        }
        impl $trait<RatFn> for RatFn {
            type Output = RatFn;
            fn $method(self, rhs: RatFn) -> RatFn {
                $body(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &RatFn, b: &RatFn| a.add_impl(b, false));
forward_binop!(Sub, sub, |a: &RatFn, b: &RatFn| a.add_impl(b, true));
forward_binop!(Mul, mul, |a: &RatFn, b: &RatFn| a.mul_impl(b));

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

impl std::iter::Sum for RatFn {
    fn sum<I: Iterator<Item = RatFn>>(iter: I) -> RatFn {
        iter.fold(RatFn::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &SparsePoly| {
            if p.num_terms() == 1 && p.leading_coeff() >= Rational::zero() {
                p.to_string()
            } else {
                format!("({p})")
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

/// Split a denominator factor into variable factors from its monomial content
/// and a primitive part of leading coefficient 1, returning the scalar unit
/// that was pulled out.
fn split_factor(f: &SparsePoly, out: &mut Vec<SparsePoly>) -> Rational {
    if let Some(c) = f.constant_value() {
        return c;
    }
    let mut rest = f.clone();
    for (v, e) in f.monomial_content() {
        let x = SparsePoly::var(v);
        let xe = x.pow(e);
        rest = rest.div_exact(&xe).expect("monomial content divides");
        for _ in 0..e {
            out.push(x.clone());
        }
    }
    if let Some(c) = rest.constant_value() {
        return c;
    }
    let lc = rest.leading_coeff();
    out.push(rest.monic());
    lc
}

/// Accumulates `Σ num_j / Π den_factors_j` over a common denominator built as
/// the lcm of the factor multisets, reducing only once at the end.
///
/// Summands over fixed points typically share many linear denominator
/// factors; matching them structurally avoids multivariate gcds on large
/// intermediate denominators.
#[derive(Debug, Default, Clone)]
pub struct FactoredSum {
    terms: Vec<(SparsePoly, Vec<SparsePoly>)>,
}

impl FactoredSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `num / Π factors`.
    pub fn push(&mut self, num: SparsePoly, factors: &[SparsePoly]) -> Result<()> {
        let mut unit = Rational::one();
        let mut normalized = Vec::with_capacity(factors.len());
        for f in factors {
            if f.is_zero() {
                return Err(Error::DivisionByZero);
            }
            unit *= split_factor(f, &mut normalized);
        }
        self.terms.push((num.scale(&unit.recip()), normalized));
        Ok(())
    }

    pub fn push_ratfn(&mut self, r: &RatFn) {
        self.push(r.num.clone(), std::slice::from_ref(&r.den))
            .expect("canonical denominators are nonzero");
    }

    pub fn finish(self) -> RatFn {
        let mut lcm: Vec<(SparsePoly, u32)> = Vec::new();
        let counted: Vec<Vec<(usize, u32)>> = self
            .terms
            .iter()
            .map(|(_, factors)| {
                let mut counts: Vec<(usize, u32)> = Vec::new();
                for f in factors {
                    let idx = match lcm.iter().position(|(g, _)| g == f) {
                        Some(i) => i,
                        None => {
                            lcm.push((f.clone(), 0));
                            lcm.len() - 1
                        }
                    };
                    match counts.iter_mut().find(|(i, _)| *i == idx) {
                        Some((_, c)) => *c += 1,
                        None => counts.push((idx, 1)),
                    }
                }
                for &(i, c) in &counts {
                    lcm[i].1 = lcm[i].1.max(c);
                }
                counts
            })
            .collect();

        let mut total = SparsePoly::zero();
        for ((num, _), counts) in self.terms.iter().zip(&counted) {
            if num.is_zero() {
                continue;
            }
            let mut term = num.clone();
            for (i, (f, m)) in lcm.iter().enumerate() {
                let have = counts.iter().find(|(k, _)| *k == i).map_or(0, |&(_, c)| c);
                if *m > have {
                    term = &term * &f.pow(m - have);
                }
            }
            total = &total + &term;
        }
        reduce_against_factors(total, lcm)
    }
}

fn reduce_against_factors(mut num: SparsePoly, mut factors: Vec<(SparsePoly, u32)>) -> RatFn {
    if num.is_zero() {
        return RatFn::zero();
    }
    for (f, m) in factors.iter_mut() {
        while *m > 0 {
            match num.div_exact(f) {
                Some(q) => {
                    num = q;
                    *m -= 1;
                }
                None => break,
            }
        }
    }
    let mut den = SparsePoly::one();
    let mut all_linear = true;
    for (f, m) in &factors {
        if *m == 0 {
            continue;
        }
        all_linear &= f.total_degree() == 1;
        den = &den * &f.pow(*m);
    }
    if all_linear {
        // Linear factors are irreducible; none of the survivors divides `num`.
        RatFn::from_coprime(num, den)
    } else {
        RatFn::new(num, den).expect("product of nonzero factors")
    }
}
