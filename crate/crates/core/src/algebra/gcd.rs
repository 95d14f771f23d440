//! Multivariate polynomial gcd over ℚ.
//!
//! Recursive: the polynomial is viewed as univariate in its first variable
//! with coefficients in the remaining variables; contents are handled by
//! recursion and primitive parts by the subresultant remainder sequence.

use super::poly::{SparsePoly, Var};

type UniPoly = Vec<SparsePoly>;

/// Greatest common divisor, normalized to leading coefficient 1.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return SparsePoly::one();
    }
    if a == b {
        return a.monic();
    }
    if a.total_degree() <= b.total_degree() {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }
    gcd_recursive(a, b).monic()
}

pub fn lcm(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_zero() || b.is_zero() {
        return SparsePoly::zero();
    }
    let g = gcd(a, b);
    (a.div_exact(&g).expect("gcd divides its argument") * b).monic()
}

fn main_var(a: &SparsePoly, b: &SparsePoly) -> Var {
    match (a.vars().first(), b.vars().first()) {
        (Some(x), Some(y)) => x.min(y).clone(),
        (Some(x), None) | (None, Some(x)) => x.clone(),
        (None, None) => unreachable!("constants are handled before recursion"),
    }
}

fn gcd_recursive(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    if a.is_constant() || b.is_constant() {
        return SparsePoly::one();
    }
    let x = main_var(a, b);
    let ua = a.coefficients_in(&x);
    let ub = b.coefficients_in(&x);
    if ua.len() == 1 {
        return gcd(a, &content(&ub));
    }
    if ub.len() == 1 {
        return gcd(&content(&ua), b);
    }
    let ca = content(&ua);
    let cb = content(&ub);
    let pa = divide_all(&ua, &ca);
    let pb = divide_all(&ub, &cb);
    let g_content = gcd(&ca, &cb);
    let g_prim = subresultant_gcd(pa, pb);
    let prim = SparsePoly::from_coefficients(&x, &g_prim);
    &g_content * &prim
}

fn content(coeffs: &[SparsePoly]) -> SparsePoly {
    let mut g = SparsePoly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, c);
        if g.is_constant() {
            return SparsePoly::one();
        }
    }
    g
}

fn divide_all(coeffs: &[SparsePoly], d: &SparsePoly) -> UniPoly {
    coeffs
        .iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

fn degree(p: &UniPoly) -> usize {
    p.len() - 1
}

fn trim(p: &mut UniPoly) {
    while p.len() > 1 && p.last().is_some_and(SparsePoly::is_zero) {
        p.pop();
    }
}

fn is_zero(p: &UniPoly) -> bool {
    p.iter().all(SparsePoly::is_zero)
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`.
fn pseudo_remainder(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let db = degree(b);
    let lb = &b[db];
    let mut r = a.clone();
    let mut e = degree(a) + 1 - db;
    while !is_zero(&r) && degree(&r) >= db {
        let dr = degree(&r);
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (k, bk) in b.iter().enumerate() {
            r[k + shift] = &r[k + shift] - &(&lr * bk);
        }
        r.pop();
        trim(&mut r);
        e -= 1;
    }
    if e > 0 {
        let f = lb.pow(e as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    r
}

/// Primitive gcd of two primitive univariate polynomials (coefficients in a polynomial ring).
fn subresultant_gcd(a: UniPoly, b: UniPoly) -> UniPoly {
    let (mut a, mut b) = if degree(&a) >= degree(&b) { (a, b) } else { (b, a) };
    let mut g = SparsePoly::one();
    let mut h = SparsePoly::one();
    loop {
        let delta = (degree(&a) - degree(&b)) as u32;
        let r = pseudo_remainder(&a, &b);
        if is_zero(&r) {
            break;
        }
        if degree(&r) == 0 {
            return vec![SparsePoly::one()];
        }
        let divisor = &g * &h.pow(delta);
        let next: UniPoly = r
            .iter()
            .map(|c| c.div_exact(&divisor).expect("subresultant division is exact"))
            .collect();
        a = std::mem::replace(&mut b, next);
        g = a[degree(&a)].clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            num.div_exact(&den).expect("subresultant h update is exact")
        };
    }
    let c = content(&b);
    divide_all(&b, &c)
}
