//! Characteristic-class arithmetic: Chern polynomials, equivariant classes at
//! fixed points and truncated class series on ℙⁿ.
//!
//! Equivariant classes are returned in weight-normalized form: the true class
//! `c̃_k = P_k((i/2π) 𝕃)` equals `(−1)ᵏ τ⁻ᵏ e_k(𝕃)` with `τ = 2πi`, and the
//! localize module tracks the `τ` power separately.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{RatFn, SparsePoly};
use crate::error::{Error, Result};
use crate::expr::{parse_poly, SymbolContext};
use crate::model::FixedPoint;

/// A polynomial `Φ(c₁, …, c_n)` in abstract Chern classes. The class `c_i`
/// has weight `i`; `Φ` is a characteristic integrand on an `n`-fold when
/// every term has total weight `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
    inhomogeneous: bool,
}

fn weight_of(exps: &[u32]) -> usize {
    exps.iter()
        .enumerate()
        .map(|(i, &m)| (i + 1) * m as usize)
        .sum()
}

impl ChernPoly {
    /// Builds `Φ` from `(exponents, coefficient)` pairs; exponent vectors are
    /// padded or must fit in `n` classes.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut map: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (mut exps, c) in terms {
            if exps.len() > n {
                if exps[n..].iter().any(|&m| m != 0) {
                    return Err(Error::InvalidArgument(format!(
                        "term uses a class beyond c{n}"
                    )));
                }
                exps.truncate(n);
            }
            exps.resize(n, 0);
            *map.entry(exps).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let inhomogeneous = map.keys().any(|e| weight_of(e) != n);
        Ok(ChernPoly {
            n,
            terms: map,
            inhomogeneous,
        })
    }

    /// The monomial `Π c_i^{m_i}`.
    pub fn monomial(n: usize, exps: &[u32]) -> Result<Self> {
        Self::from_terms(n, [(exps.to_vec(), Rational::one())])
    }

    /// The single class `c_k`.
    pub fn class(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("c{k} is not a class on an {n}-fold")));
        }
        let mut e = vec![0; n];
        e[k - 1] = 1;
        Self::monomial(n, &e)
    }

    /// Parses `"c1^2 - 2*c2"`. Classes may be written `c1 … cn` or, for the
    /// virtual classes of a twisted field, `g1 … gn`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let names = (1..=n).flat_map(|k| [format!("c{k}"), format!("g{k}")]);
        let poly = parse_poly(text, &SymbolContext::only(names))?;
        Self::from_sparse(n, &poly)
    }

    fn from_sparse(n: usize, poly: &SparsePoly) -> Result<Self> {
        let index: Vec<usize> = poly
            .vars()
            .iter()
            .map(|v| v.name()[1..].parse::<usize>().expect("context admits only indexed classes") - 1)
            .collect();
        let terms = poly.terms().map(|(m, c)| {
            let mut exps = vec![0u32; n];
            for (slot, &e) in index.iter().zip(m.exps()) {
                exps[*slot] += e;
            }
            (exps, c.clone())
        });
        Self::from_terms(n, terms)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_inhomogeneous(&self) -> bool {
        self.inhomogeneous
    }

    /// Weights `Σ i·m_i` of the terms, in term order.
    pub fn term_weights(&self) -> Vec<usize> {
        self.terms.keys().map(|e| weight_of(e)).collect()
    }

    /// The error for the first term whose weight is not `n`.
    pub fn require_homogeneous(&self) -> Result<()> {
        match self.terms.iter().find(|(e, _)| weight_of(e) != self.n) {
            None => Ok(()),
            Some((e, c)) => Err(Error::Inhomogeneous {
                expected: self.n,
                found: weight_of(e),
                term: Self::term_string(e, c),
            }),
        }
    }

    fn term_string(exps: &[u32], c: &Rational) -> String {
        let mut parts = Vec::new();
        if !c.is_one() || exps.iter().all(|&m| m == 0) {
            parts.push(rational::display(c));
        }
        for (i, &m) in exps.iter().enumerate() {
            match m {
                0 => {}
                1 => parts.push(format!("c{}", i + 1)),
                _ => parts.push(format!("c{}^{m}", i + 1)),
            }
        }
        parts.join("*")
    }

    /// Evaluates on class values; classes beyond `values.len()` are zero.
    pub fn eval(&self, values: &[RatFn]) -> RatFn {
        let mut total = RatFn::zero();
        'terms: for (exps, c) in &self.terms {
            let mut term = RatFn::constant(c.clone());
            for (i, &m) in exps.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                match values.get(i) {
                    Some(v) => term = &term * &v.pow(m),
                    None => continue 'terms,
                }
            }
            total = &total + &term;
        }
        total
    }

    /// Evaluates on polynomial class values, staying in the polynomial ring.
    pub fn eval_poly(&self, values: &[SparsePoly]) -> SparsePoly {
        let mut total = SparsePoly::zero();
        'terms: for (exps, c) in &self.terms {
            let mut term = SparsePoly::constant(c.clone());
            for (i, &m) in exps.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                match values.get(i) {
                    Some(v) => term = &term * &v.pow(m),
                    None => continue 'terms,
                }
            }
            total = &total + &term;
        }
        total
    }

    /// Evaluates on truncated class series, returning the product series.
    pub fn eval_series(&self, values: &[ClassSeries]) -> ClassSeries {
        let order = values.first().map_or(self.n, |s| s.order());
        let mut total = ClassSeries::zero(order);
        'terms: for (exps, c) in &self.terms {
            let mut term = ClassSeries::constant(order, c.clone());
            for (i, &m) in exps.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                match values.get(i) {
                    Some(v) => term = term.mul(&v.pow(m)),
                    None => continue 'terms,
                }
            }
            total = total.add(&term);
        }
        total
    }
}

impl fmt::Display for ChernPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (exps, c)) in self.terms.iter().rev().enumerate() {
            let text = Self::term_string(exps, &rational::abs(c));
            match (k, c.is_negative()) {
                (0, false) => f.write_str(&text)?,
                (0, true) => write!(f, "-{text}")?,
                (_, false) => write!(f, " + {text}")?,
                (_, true) => write!(f, " - {text}")?,
            }
        }
        Ok(())
    }
}

/// `true` iff every term of `Φ` has weight `n`.
pub fn check_weighted_degree(phi: &ChernPoly) -> bool {
    phi.term_weights().iter().all(|&w| w == phi.n)
}

/// A power series in the hyperplane class `H`, truncated after `Hⁿ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSeries {
    coeffs: Vec<Rational>,
}

impl ClassSeries {
    pub fn zero(order: usize) -> Self {
        ClassSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    pub fn constant(order: usize, c: Rational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, Rational::one())
    }

    /// Series from the leading coefficients; the rest are zero and extra
    /// coefficients beyond `order` are dropped.
    pub fn from_coeffs(order: usize, coeffs: &[Rational]) -> Self {
        let mut s = Self::zero(order);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c.clone();
        }
        s
    }

    /// `1 + a·H`, the total Chern class of a line bundle of degree `a`.
    pub fn line(order: usize, a: &Rational) -> Self {
        Self::from_coeffs(order, &[Rational::one(), a.clone()])
    }

    /// `c(Θ_{ℙⁿ}) = (1 + H)^{n+1}`.
    pub fn projective_tangent(n: usize) -> Self {
        Self::line(n, &Rational::one()).pow(n as u32 + 1)
    }

    /// `c(Θ − 𝓛*) = (1 + H)^{n+1} / (1 − dH)` for `𝓛 = 𝒪(d)` on ℙⁿ.
    pub fn projective_virtual(n: usize, d: i64) -> Self {
        let dual = Self::line(n, &rational::int(-d));
        Self::projective_tangent(n)
            .div(&dual)
            .expect("constant term is 1")
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The degree-`k` part as a series, e.g. `c_k(E)·H^k`.
    pub fn part(&self, k: usize) -> Self {
        let mut s = Self::zero(self.order());
        s.coeffs[k] = self.coeffs[k].clone();
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        ClassSeries {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.order()), |acc, _| acc.mul(self))
    }

    /// Multiplicative inverse by the recursion `b_k = −(Σ_{i≥1} a_i b_{k−i}) / a_0`.
    pub fn inv(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut b = Self::zero(self.order());
        b.coeffs[0] = a0.recip();
        for k in 1..=self.order() {
            let s: Rational = (1..=k).map(|i| &self.coeffs[i] * &b.coeffs[k - i]).sum();
            b.coeffs[k] = -s / a0;
        }
        Ok(b)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }
}

/// Weight-normalized equivariant Chern classes `(e₁, …, e_n)` of the tangent
/// linearization at `p`; the last entry is `det 𝕃`.
pub fn equivariant_chern_at_point(p: &FixedPoint) -> Result<Vec<RatFn>> {
    let e = p.tangent.elementary_symmetric();
    if e.last().is_some_and(RatFn::is_zero) {
        return Err(Error::Degenerate {
            point: p.name.clone(),
        });
    }
    Ok(e)
}

/// Weight-normalized equivariant Chern classes of the bundle endomorphism at `p`.
pub fn bundle_chern_at_point(p: &FixedPoint) -> Result<Vec<RatFn>> {
    p.bundle_matrix()
        .map(|m| m.elementary_symmetric())
        .ok_or_else(|| Error::MissingBundleData {
            point: p.name.clone(),
        })
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `∫_{ℙⁿ} Φ(c(Θ))` read off directly from `c_k(Θ_{ℙⁿ}) = C(n+1, k) Hᵏ`.
pub fn chern_numbers_pn(n: usize, phi: &ChernPoly) -> Result<Rational> {
    if phi.n != n {
        return Err(Error::InvalidArgument(format!(
            "Φ is written for dimension {}, not {n}",
            phi.n
        )));
    }
    phi.require_homogeneous()?;
    let mut total = Rational::zero();
    for (exps, c) in &phi.terms {
        let mut term = c.clone();
        for (i, &m) in exps.iter().enumerate() {
            let ck = Rational::from_integer(binomial(n as u64 + 1, i as u64 + 1));
            term *= rational::pow(&ck, m);
        }
        total += term;
    }
    Ok(total)
}

/// `∫_{ℙⁿ} Φ(γ₁, …, γ_n)` for the virtual bundle `Θ − 𝓛*`, `𝓛 = 𝒪(d)`.
pub fn virtual_chern_numbers_pn(n: usize, d: i64, phi: &ChernPoly) -> Result<Rational> {
    if phi.n != n {
        return Err(Error::InvalidArgument(format!(
            "Φ is written for dimension {}, not {n}",
            phi.n
        )));
    }
    phi.require_homogeneous()?;
    let gamma = ClassSeries::projective_virtual(n, d);
    let classes: Vec<ClassSeries> = (1..=n).map(|k| gamma.part(k)).collect();
    Ok(phi.eval_series(&classes).coeff(n).clone())
}

/// Chern character `(ch₁, …, ch_n)` of a class with total Chern class `c`,
/// via Newton's identities `p_k = Σ_{i<k} (−1)^{i−1} e_i p_{k−i} + (−1)^{k−1} k e_k`
/// and `ch_k = p_k / k!`.
pub fn chern_character(c: &ClassSeries) -> Vec<Rational> {
    let n = c.order();
    let e = c.coeffs();
    let mut p = vec![Rational::zero(); n + 1];
    let sign = |i: usize| if i % 2 == 1 { Rational::one() } else { -Rational::one() };
    for k in 1..=n {
        let mut s: Rational = (1..k).map(|i| sign(i) * &e[i] * &p[k - i]).sum();
        s += sign(k) * rational::int(k as i64) * &e[k];
        p[k] = s;
    }
    let mut fact = Rational::one();
    (1..=n)
        .map(|k| {
            fact *= rational::int(k as i64);
            &p[k] / &fact
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};
    use crate::algebra::{SquareMatrix, Var};

    fn phi(text: &str, n: usize) -> ChernPoly {
        ChernPoly::parse(text, n).unwrap()
    }

    #[test]
    fn weighted_degree() {
        assert!(check_weighted_degree(&phi("c1^3", 3)));
        assert!(check_weighted_degree(&phi("c1*c2", 3)));
        assert!(!check_weighted_degree(&phi("c2^2", 3)));
        let err = phi("c1^2 + c2^2", 3).require_homogeneous().unwrap_err();
        assert!(matches!(err, Error::Inhomogeneous { expected: 3, found: 4, .. }), "{err}");
        assert!(ChernPoly::parse("c4", 3).is_err());
        assert_eq!(phi("g1^2 - 2*c2", 2), phi("c1^2 - 2*g2", 2));
    }

    #[test]
    fn display_round_trips() {
        for text in ["c1^2 - 2*c2", "c3", "-1/2*c1*c2 + c1^3"] {
            let p = phi(text, 3);
            assert_eq!(phi(&p.to_string(), 3), p);
        }
    }

    #[test]
    fn pn_numbers() {
        assert_eq!(chern_numbers_pn(2, &phi("c2", 2)).unwrap(), int(3));
        assert_eq!(chern_numbers_pn(2, &phi("c1^2", 2)).unwrap(), int(9));
        assert_eq!(chern_numbers_pn(3, &phi("c1*c2", 3)).unwrap(), int(24));
        assert!(chern_numbers_pn(3, &phi("c2", 3)).is_err());
    }

    // Manual truncated-series products, written independently of ClassSeries.
    fn truncated_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
        let mut out = vec![0; n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                out[i + j] += a.get(i).copied().unwrap_or(0) * b.get(j).copied().unwrap_or(0);
            }
        }
        out
    }

    #[test]
    fn virtual_numbers_against_manual_series() {
        // ℙ¹, d = 1: (1 + 2H)(1 + H) = 1 + 3H.
        let g = truncated_mul(&[1, 2], &[1, 1], 1);
        assert_eq!(virtual_chern_numbers_pn(1, 1, &phi("g1", 1)).unwrap(), int(g[1]));
        assert_eq!(virtual_chern_numbers_pn(1, 1, &phi("g1", 1)).unwrap(), int(3));
        assert_eq!(virtual_chern_numbers_pn(1, 0, &phi("g1", 1)).unwrap(), int(2));
        assert_eq!(virtual_chern_numbers_pn(2, 0, &phi("g1^2", 2)).unwrap(), int(9));
        // ℙ², d = 2: (1 + 3H + 3H²)(1 + 2H + 4H²).
        let g = truncated_mul(&[1, 3, 3], &[1, 2, 4], 2);
        assert_eq!(virtual_chern_numbers_pn(2, 2, &phi("g2", 2)).unwrap(), int(g[2]));
        assert_eq!(virtual_chern_numbers_pn(2, 2, &phi("g1^2", 2)).unwrap(), int(g[1] * g[1]));
    }

    #[test]
    fn trivial_twist_matches_untwisted() {
        for (n, text) in [(2, "c1^2"), (2, "c2"), (3, "c1^3"), (3, "c1*c2 - 3*c3"), (4, "c2^2 + c4")] {
            let p = phi(text, n);
            assert_eq!(virtual_chern_numbers_pn(n, 0, &p).unwrap(), chern_numbers_pn(n, &p).unwrap());
        }
    }

    #[test]
    fn series_quotient_round_trip() {
        for n in 1..5 {
            for d in -2..4 {
                let dual = ClassSeries::line(n, &int(-d));
                let gamma = ClassSeries::projective_virtual(n, d);
                assert_eq!(gamma.mul(&dual), ClassSeries::projective_tangent(n));
            }
        }
    }

    #[test]
    fn chern_character_of_virtual_bundle() {
        // ch(Θ − 𝓛*) = (n+1)e^H − 1 − e^{−dH}: ch_k = ((n+1) − (−d)^k)/k!.
        for n in 1..=2usize {
            for d in 0..4i64 {
                let ch = chern_character(&ClassSeries::projective_virtual(n, d));
                let mut fact = 1i64;
                for k in 1..=n {
                    fact *= k as i64;
                    let expect = frac(n as i64 + 1 - (-d).pow(k as u32), fact);
                    assert_eq!(ch[k - 1], expect, "n={n} d={d} k={k}");
                }
            }
        }
    }

    #[test]
    fn equivariant_classes() {
        let p = FixedPoint::new("p", SquareMatrix::diagonal(vec![RatFn::from_int(1), RatFn::from_int(2)]));
        assert_eq!(equivariant_chern_at_point(&p).unwrap(), vec![RatFn::from_int(3), RatFn::from_int(2)]);
        let l = |i| RatFn::var(Var::weight(i));
        let q = FixedPoint::new("q", SquareMatrix::diagonal(vec![&l(1) - &l(0)]));
        assert_eq!(equivariant_chern_at_point(&q).unwrap(), vec![&l(1) - &l(0)]);
        let z = FixedPoint::new("z", SquareMatrix::diagonal(vec![RatFn::one(), RatFn::zero()]));
        assert!(matches!(equivariant_chern_at_point(&z), Err(Error::Degenerate { .. })));
        assert!(matches!(bundle_chern_at_point(&q), Err(Error::MissingBundleData { .. })));
    }
}
