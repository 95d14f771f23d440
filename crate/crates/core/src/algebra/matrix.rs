//! Square matrices over rational functions.

use std::fmt;

use super::gcd::lcm;
use super::poly::SparsePoly;
use super::ratfn::RatFn;
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<RatFn>,
}

impl SquareMatrix {
    pub fn from_rows(rows: Vec<Vec<RatFn>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not square: row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        Ok(SquareMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> RatFn) -> Self {
        SquareMatrix {
            n,
            entries: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    pub fn from_rationals(rows: &[Vec<Rational>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().cloned().map(RatFn::constant).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { RatFn::one() } else { RatFn::zero() })
    }

    pub fn diagonal(diag: Vec<RatFn>) -> Self {
        let n = diag.len();
        let mut m = Self::from_fn(n, |_, _| RatFn::zero());
        for (i, d) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFn {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<RatFn>> {
        self.entries.chunks(self.n.max(1)).map(<[RatFn]>::to_vec).take(self.n).collect()
    }

    pub fn diag(&self) -> Vec<RatFn> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> Self {
        SquareMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &RatFn) -> Self {
        self.map(|e| e * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|e| -e)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum()
        }))
    }

    pub fn block_diagonal(a: &Self, b: &Self) -> Self {
        let n = a.n + b.n;
        Self::from_fn(n, |i, j| match (i < a.n, j < a.n) {
            (true, true) => a.get(i, j).clone(),
            (false, false) => b.get(i - a.n, j - a.n).clone(),
            _ => RatFn::zero(),
        })
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_triangular(&self) -> bool {
        self.is_upper_triangular() || self.is_lower_triangular()
    }

    /// Polynomial matrix `N` and polynomial `L` with `self = N / L`.
    pub fn cleared(&self) -> (Vec<Vec<SparsePoly>>, SparsePoly) {
        let mut l = SparsePoly::one();
        for e in &self.entries {
            if !e.denom().is_one() {
                l = lcm(&l, e.denom());
            }
        }
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let e = self.get(i, j);
                        if e.denom().is_one() {
                            e.numer() * &l
                        } else {
                            e.numer() * &l.div_exact(e.denom()).expect("lcm is a multiple")
                        }
                    })
                    .collect()
            })
            .collect();
        (rows, l)
    }

    /// Exact determinant. Triangular matrices use the diagonal product;
    /// everything else goes through fraction-free elimination over the
    /// polynomial ring after clearing denominators.
    pub fn det(&self) -> RatFn {
        if self.n == 0 {
            return RatFn::one();
        }
        if self.is_triangular() {
            return self.diag().iter().fold(RatFn::one(), |acc, d| &acc * d);
        }
        let (rows, l) = self.cleared();
        let d = bareiss_det(rows);
        RatFn::new(d, l.pow(self.n as u32)).expect("lcm of denominators is nonzero")
    }

    /// `(e_1, …, e_n)`, the elementary symmetric functions of the eigenvalues,
    /// read off the characteristic polynomial `det(xI − M) = Σ (−1)^k e_k x^(n−k)`.
    pub fn elementary_symmetric(&self) -> Vec<RatFn> {
        if self.is_triangular() {
            return elementary_symmetric_of(&self.diag());
        }
        let (rows, l) = self.cleared();
        let coeffs = berkowitz(&rows);
        (1..=self.n)
            .map(|k| {
                let ek = if k % 2 == 0 {
                    coeffs[k].clone()
                } else {
                    -&coeffs[k]
                };
                RatFn::new(ek, l.pow(k as u32)).expect("lcm of denominators is nonzero")
            })
            .collect()
    }
}

/// Elementary symmetric functions of a list, via `Π (1 + x_i T)`.
pub fn elementary_symmetric_of(values: &[RatFn]) -> Vec<RatFn> {
    let mut e = vec![RatFn::one()];
    for x in values {
        let mut next = e.clone();
        next.push(RatFn::zero());
        for k in 1..next.len() {
            next[k] = &next[k] + &(&e[k - 1] * x);
        }
        e = next;
    }
    e.remove(0);
    e
}

/// Fraction-free Gaussian elimination; every division is exact in the polynomial ring.
fn bareiss_det(mut a: Vec<Vec<SparsePoly>>) -> SparsePoly {
    let n = a.len();
    let mut negate = false;
    let mut prev = SparsePoly::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return SparsePoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Division-free characteristic polynomial: returns `[1, c_1, …, c_n]` with
/// `det(xI − A) = Σ c_k x^(n−k)`.
fn berkowitz(a: &[Vec<SparsePoly>]) -> Vec<SparsePoly> {
    let n = a.len();
    if n == 0 {
        return vec![SparsePoly::one()];
    }
    let mut v = vec![SparsePoly::one(), -&a[0][0]];
    for r in 1..n {
        let mut t = Vec::with_capacity(r + 2);
        t.push(SparsePoly::one());
        t.push(-&a[r][r]);
        let mut w: Vec<SparsePoly> = (0..r).map(|i| a[i][r].clone()).collect();
        for k in 0..r {
            let dot = (0..r).fold(SparsePoly::zero(), |acc, j| &acc + &(&a[r][j] * &w[j]));
            t.push(-dot);
            if k + 1 < r {
                w = (0..r)
                    .map(|i| (0..r).fold(SparsePoly::zero(), |acc, j| &acc + &(&a[i][j] * &w[j])))
                    .collect();
            }
        }
        let mut next = vec![SparsePoly::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                *slot = &*slot + &(&t[i - j] * vj);
            }
        }
        v = next;
    }
    v
}

impl fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::Var;
    use crate::algebra::rational::int;

    fn ints(rows: &[&[i64]]) -> SquareMatrix {
        SquareMatrix::from_rationals(
            &rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_swap() {
        assert!(SquareMatrix::identity(3).det().is_one());
        assert_eq!(ints(&[&[0, 1], &[1, 0]]).det(), RatFn::from_int(-1));
    }

    #[test]
    fn pivoting_needed() {
        let m = ints(&[&[0, 2, 1], &[1, 0, 0], &[3, 1, 1]]);
        // cofactor along row 1: −1·(2·1 − 1·1) = −1
        assert_eq!(m.det(), RatFn::from_int(-1));
    }

    #[test]
    fn singular_matrix_has_zero_det() {
        let m = ints(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 5]]);
        assert!(m.det().is_zero());
    }

    #[test]
    fn elementary_symmetric_diag_and_nilpotent() {
        let a = RatFn::var(Var::new("a"));
        let b = RatFn::var(Var::new("b"));
        let e = SquareMatrix::diagonal(vec![a.clone(), b.clone()]).elementary_symmetric();
        assert_eq!(e, vec![&a + &b, &a * &b]);
        let nil = ints(&[&[0, 1], &[0, 0]]).elementary_symmetric();
        assert!(nil.iter().all(RatFn::is_zero));
    }

    #[test]
    fn berkowitz_general_2x2() {
        let m = ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.elementary_symmetric(), vec![RatFn::from_int(5), RatFn::from_int(-2)]);
    }

    #[test]
    fn rational_function_entries() {
        let x = RatFn::var(Var::new("x"));
        let inv = x.inv().unwrap();
        let m = SquareMatrix::from_rows(vec![
            vec![x.clone(), RatFn::one()],
            vec![RatFn::one(), inv.clone()],
        ])
        .unwrap();
        assert!(m.det().is_zero());
        let e = m.elementary_symmetric();
        assert_eq!(e[0], &x + &inv);
        assert!(e[1].is_zero());
    }
}
