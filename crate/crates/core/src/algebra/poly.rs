//! Sparse multivariate polynomials over ℚ.
//!
//! A polynomial stores the sorted list of variables it actually depends on and
//! a map from exponent vectors to nonzero coefficients. Operands with different
//! variable sets are aligned on the fly, and results are trimmed back to the
//! variables that occur, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::rational::{self, Rational};

/// An indeterminate. Ordering is the global variable order: `t` first, then
/// the weights `l0, l1, ...`, then every other name in natural order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Var {
        Var(name.into())
    }

    /// The weight indeterminate λ_i, spelled `l{i}`.
    pub fn weight(i: usize) -> Var {
        Var(format!("l{i}"))
    }

    pub fn t() -> Var {
        Var("t".to_owned())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    fn sort_key(&self) -> (u8, &str, u64, &str) {
        if self.0 == "t" {
            return (0, "", 0, "");
        }
        let split = self
            .0
            .find(|c: char| c.is_ascii_digit())
            .filter(|&i| self.0[i..].chars().all(|c| c.is_ascii_digit()));
        let (prefix, index) = match split {
            Some(i) => (&self.0[..i], self.0[i..].parse::<u64>().unwrap_or(u64::MAX)),
            None => (self.0.as_str(), 0),
        };
        let class = if prefix == "l" && split.is_some() { 1 } else { 2 };
        (class, prefix, index, &self.0)
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Exponent vector under graded lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    vars: Vec<Var>,
    terms: BTreeMap<Monomial, Rational>,
}

pub type Poly = SparsePoly;

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(Vec::new()), c);
        }
        SparsePoly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rational::int(n))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(vec![1]), Rational::one());
        SparsePoly {
            vars: vec![v],
            terms,
        }
    }

    pub fn named(name: &str) -> Self {
        Self::var(Var::new(name))
    }

    /// Builds a polynomial from arbitrary (variable list, exponent vector, coefficient) data.
    /// The variable list may be unsorted; it must not contain duplicates.
    pub fn from_terms<I>(vars: &[Var], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        let sorted: Vec<Var> = order.iter().map(|&i| vars[i].clone()).collect();
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (exps, c) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
            let m = Monomial(order.iter().map(|&i| exps[i]).collect());
            add_into(&mut map, m, c);
        }
        SparsePoly {
            vars: sorted,
            terms: map,
        }
        .trimmed()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_else(Rational::zero))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: &Var) -> u32 {
        match self.var_index(v) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    fn var_index(&self, v: &Var) -> Option<usize> {
        self.vars.binary_search(v).ok()
    }

    /// Leading term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Scales to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) if !c.is_one() => {
                let inv = c.recip();
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Re-expresses the polynomial over a superset of its variables.
    fn aligned(&self, vars: &[Var]) -> BTreeMap<Monomial, Rational> {
        if self.vars == vars {
            return self.terms.clone();
        }
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("aligning onto a non-superset"))
            .collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0; vars.len()];
                for (k, &e) in m.0.iter().enumerate() {
                    exps[map[k]] = e;
                }
                (Monomial(exps), c.clone())
            })
            .collect()
    }

    fn merged_vars(a: &[Var], b: &[Var]) -> Vec<Var> {
        if a == b {
            return a.to_vec();
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => match x.cmp(y) {
                    Ordering::Less => {
                        out.push(x.clone());
                        i += 1;
                    }
                    Ordering::Greater => {
                        out.push(y.clone());
                        j += 1;
                    }
                    Ordering::Equal => {
                        out.push(x.clone());
                        i += 1;
                        j += 1;
                    }
                },
                (Some(x), None) => {
                    out.push(x.clone());
                    i += 1;
                }
                (None, Some(y)) => {
                    out.push(y.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// Drops variables that no longer occur.
    fn trimmed(mut self) -> Self {
        if self.terms.is_empty() {
            self.vars.clear();
            return self;
        }
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        let terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(m, c)| {
                let exps = m
                    .0
                    .into_iter()
                    .zip(&used)
                    .filter(|(_, &u)| u)
                    .map(|(e, _)| e)
                    .collect();
                (Monomial(exps), c)
            })
            .collect();
        SparsePoly { vars, terms }
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let vars = Self::merged_vars(&self.vars, &other.vars);
        let mut terms = self.aligned(&vars);
        for (m, c) in other.aligned(&vars) {
            add_into(&mut terms, m, if negate { -c } else { c });
        }
        SparsePoly { vars, terms }.trimmed()
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        let vars = Self::merged_vars(&self.vars, &other.vars);
        let a = self.aligned(&vars);
        let b = other.aligned(&vars);
        let mut terms = BTreeMap::new();
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                add_into(&mut terms, ma.mul(mb), ca * cb);
            }
        }
        SparsePoly { vars, terms }.trimmed()
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        assert!(!divisor.is_zero(), "exact division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if divisor.vars.iter().any(|v| self.var_index(v).is_none()) {
            return None;
        }
        let vars = self.vars.clone();
        let mut rem = self.terms.clone();
        let d = divisor.aligned(&vars);
        let (lm, lc) = d.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.recip();
        let mut quot = BTreeMap::new();
        while let Some((m, c)) = rem.iter().next_back() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = c * &lc_inv;
            for (dm, dc) in &d {
                add_into(&mut rem, qm.mul(dm), -(&qc * dc));
            }
            quot.insert(qm, qc);
        }
        Some(SparsePoly { vars, terms: quot }.trimmed())
    }

    pub fn derivative(&self, v: &Var) -> Self {
        let Some(i) = self.var_index(v) else {
            return Self::zero();
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            add_into(&mut terms, Monomial(exps), c * rational::int(e as i64));
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms,
        }
        .trimmed()
    }

    /// Coefficients with respect to `v`, indexed by degree.
    pub fn coefficients_in(&self, v: &Var) -> Vec<Self> {
        let Some(i) = self.var_index(v) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(v) as usize;
        let rest: Vec<Var> = self
            .vars
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| v.clone())
            .collect();
        let mut buckets: Vec<BTreeMap<Monomial, Rational>> = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let e = exps.remove(i) as usize;
            buckets[e].insert(Monomial(exps), c.clone());
        }
        buckets
            .into_iter()
            .map(|terms| {
                SparsePoly {
                    vars: rest.clone(),
                    terms,
                }
                .trimmed()
            })
            .collect()
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients(v: &Var, coeffs: &[Self]) -> Self {
        let x = Self::var(v.clone());
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        acc
    }

    /// Substitutes a polynomial for one variable.
    pub fn substitute(&self, v: &Var, value: &Self) -> Self {
        if self.var_index(v).is_none() {
            return self.clone();
        }
        Self::horner(&self.coefficients_in(v), value)
    }

    fn horner(coeffs: &[Self], value: &Self) -> Self {
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Evaluates at rational values; variables missing from `values` stay symbolic.
    pub fn eval_partial(&self, values: &BTreeMap<Var, Rational>) -> Self {
        let mut out = self.clone();
        for (v, x) in values {
            out = out.substitute(v, &Self::constant(x.clone()));
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Vec<(Var, u32)> {
        (0..self.vars.len())
            .filter_map(|i| {
                let e = self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0);
                (e > 0).then(|| (self.vars[i].clone(), e))
            })
            .collect()
    }

    /// Maps every coefficient through `f`, e.g. to a floating type.
    pub fn map_coeffs<T>(&self, f: impl Fn(&Rational) -> T) -> Vec<(Vec<u32>, T)> {
        self.terms.iter().map(|(m, c)| (m.0.clone(), f(c))).collect()
    }

    /// Exponent of `v` in `m`, where `m` is one of this polynomial's monomials.
    pub fn exponent_of(&self, m: &Monomial, v: &Var) -> u32 {
        self.var_index(v).map_or(0, |i| m.0[i])
    }
}

fn add_into(map: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Default for SparsePoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for SparsePoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<Var> for SparsePoly {
    fn from(v: Var) -> Self {
        Self::var(v)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&SparsePoly> for &SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                $body(self, rhs)
            }
        }
        impl $trait<SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                $body(&self, &rhs)
            }
        }
        impl $trait<&SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &SparsePoly) -> SparsePoly {
                $body(&self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &SparsePoly, b: &SparsePoly| a.add_impl(b, false));
forward_binop!(Sub, sub, |a: &SparsePoly, b: &SparsePoly| a.add_impl(b, true));
forward_binop!(Mul, mul, |a: &SparsePoly, b: &SparsePoly| a.mul_impl(b));

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.degree() == 0 {
                factors.push(rational::display(&abs));
            }
            for (v, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => factors.push(v.to_string()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}
