//! Grothendieck residues: the exact quotient at nondegenerate zeroes and a
//! numerical contour oracle over the distinguished boundary of a polydisc.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::rational::to_f64;
use crate::algebra::{RatFn, SparsePoly, SquareMatrix, Var};
use crate::error::{Error, Result};
use crate::expr::{parse_poly, SymbolContext};

pub const DEFAULT_RADIUS: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 256;
pub const MAX_NUMERIC_DIM: usize = 3;

/// Samples per circle: `LOC_CALC_SAMPLES` if set and valid, else 256.
pub fn default_samples() -> usize {
    std::env::var("LOC_CALC_SAMPLES")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&m: &usize| m >= 64 && m.is_power_of_two())
        .unwrap_or(DEFAULT_SAMPLES)
}

/// `Res = s(x₀) / det J`.
pub fn residue_nondegenerate(s0: &RatFn, jacobian: &SquareMatrix) -> Result<RatFn> {
    let det = jacobian.det();
    if det.is_zero() {
        return Err(Error::DegenerateResidue);
    }
    s0.checked_div(&det)
}

/// A polynomial with Gaussian-rational coefficients, `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexPoly {
    pub re: SparsePoly,
    pub im: SparsePoly,
}

impl ComplexPoly {
    pub fn from_real(p: SparsePoly) -> Self {
        ComplexPoly {
            re: p,
            im: SparsePoly::zero(),
        }
    }

    /// Splits a polynomial in the symbol `i` using `i² = −1`.
    pub fn from_symbolic_i(p: &SparsePoly) -> Self {
        let i = Var::new("i");
        let mut re = SparsePoly::zero();
        let mut im = SparsePoly::zero();
        for (k, c) in p.coefficients_in(&i).into_iter().enumerate() {
            match k % 4 {
                0 => re = &re + &c,
                1 => im = &im + &c,
                2 => re = &re - &c,
                _ => im = &im - &c,
            }
        }
        ComplexPoly { re, im }
    }

    /// Parses a polynomial in `z1 … zn` with `i` as the imaginary unit.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let ctx = SymbolContext::indexed("z", n).with_imaginary();
        Ok(Self::from_symbolic_i(&parse_poly(text, &ctx)?))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn constant_term_is_zero(&self) -> bool {
        let zero_at = |p: &SparsePoly| p.terms().all(|(m, _)| m.degree() > 0);
        zero_at(&self.re) && zero_at(&self.im)
    }
}

/// Horner scheme, nested one variable at a time.
#[derive(Clone, Debug)]
enum Horner {
    Const(Complex64),
    /// `Σ_k coeffs[k] · z_var^k`
    Var { var: usize, coeffs: Vec<Horner> },
}

impl Horner {
    fn compile(p: &ComplexPoly, n: usize) -> Self {
        let mut terms: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (part, unit) in [(&p.re, Complex64::new(1.0, 0.0)), (&p.im, Complex64::new(0.0, 1.0))] {
            let slots: Vec<usize> = part
                .vars()
                .iter()
                .map(|v| v.name()[1..].parse::<usize>().expect("variables are z1..zn") - 1)
                .collect();
            for (m, c) in part.terms() {
                let mut exps = vec![0u32; n];
                for (s, &e) in slots.iter().zip(m.exps()) {
                    exps[*s] = e;
                }
                *terms.entry(exps).or_insert_with(Complex64::zero) += unit * to_f64(c);
            }
        }
        Self::build(terms.into_iter().collect(), 0, n)
    }

    fn build(terms: Vec<(Vec<u32>, Complex64)>, var: usize, n: usize) -> Self {
        if var == n || terms.is_empty() {
            return Horner::Const(terms.iter().map(|(_, c)| *c).sum());
        }
        let deg = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0) as usize;
        let mut buckets: Vec<Vec<(Vec<u32>, Complex64)>> = vec![Vec::new(); deg + 1];
        for (e, c) in terms {
            buckets[e[var] as usize].push((e, c));
        }
        Horner::Var {
            var,
            coeffs: buckets.into_iter().map(|b| Self::build(b, var + 1, n)).collect(),
        }
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            Horner::Const(c) => *c,
            Horner::Var { var, coeffs } => coeffs
                .iter()
                .rev()
                .fold(Complex64::zero(), |acc, c| acc * z[*var] + c.eval(z)),
        }
    }
}

/// Sections `a_1 … a_n` with a common isolated zero at `center` and a numerator `s`.
#[derive(Clone, Debug)]
pub struct ResidueProblem {
    n: usize,
    components: Vec<ComplexPoly>,
    numerator: ComplexPoly,
    center: Vec<Complex64>,
}

impl ResidueProblem {
    /// Problem centred at the origin; the components must have no constant term.
    pub fn new(components: Vec<ComplexPoly>, numerator: ComplexPoly) -> Result<Self> {
        let n = components.len();
        Self::with_center(components, numerator, vec![Complex64::zero(); n])
    }

    pub fn with_center(
        components: Vec<ComplexPoly>,
        numerator: ComplexPoly,
        center: Vec<Complex64>,
    ) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidArgument("a residue needs at least one component".into()));
        }
        if center.len() != n {
            return Err(Error::InvalidArgument(format!("center needs {n} coordinates")));
        }
        let at_origin = center.iter().all(|c| c.is_zero());
        for (k, a) in components.iter().enumerate() {
            let vanishes = if at_origin {
                a.constant_term_is_zero()
            } else {
                Horner::compile(a, n).eval(&center).norm() <= 1e-9
            };
            if !vanishes {
                return Err(Error::InvalidArgument(format!(
                    "component a{} does not vanish at the center",
                    k + 1
                )));
            }
        }
        Ok(ResidueProblem {
            n,
            components,
            numerator,
            center,
        })
    }

    /// Parses components and numerator in `z1 … zn`.
    pub fn parse(components: &[&str], numerator: &str) -> Result<Self> {
        let n = components.len();
        let comps = components
            .iter()
            .map(|c| ComplexPoly::parse(c, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps, ComplexPoly::parse(numerator, n)?)
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

struct Slab {
    sum: Complex64,
    min: f64,
    max: f64,
}

/// `(1/(2πi)ⁿ) ∫ s / (a₁⋯a_n)` over `|z_k − c_k| = radius`, by the periodic
/// trapezoid rule: the residue is the grid mean of `s·Π(z_k − c_k)/Π a_k`.
pub fn residue_contour_numeric(p: &ResidueProblem, radius: f64, samples: usize) -> Result<Complex64> {
    if p.n > MAX_NUMERIC_DIM {
        return Err(Error::InvalidArgument(format!(
            "the numeric oracle supports n ≤ {MAX_NUMERIC_DIM}, got {}",
            p.n
        )));
    }
    if samples < 64 || !samples.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "samples must be a power of two ≥ 64, got {samples}"
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let comps: Vec<Horner> = p.components.iter().map(|a| Horner::compile(a, p.n)).collect();
    let num = Horner::compile(&p.numerator, p.n);
    let circle: Vec<Complex64> = (0..samples)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64))
        .collect();
    let inner_count = samples.pow(p.n as u32 - 1);

    let slabs: Vec<Slab> = (0..samples)
        .into_par_iter()
        .map(|i0| {
            let mut offsets = vec![Complex64::zero(); p.n];
            let mut z = vec![Complex64::zero(); p.n];
            let mut values = Vec::with_capacity(inner_count);
            let (mut min, mut max) = (f64::INFINITY, 0.0f64);
            for rest in 0..inner_count {
                offsets[0] = circle[i0];
                let mut r = rest;
                for o in offsets.iter_mut().skip(1) {
                    *o = circle[r % samples];
                    r /= samples;
                }
                for k in 0..p.n {
                    z[k] = p.center[k] + offsets[k];
                }
                let den: Complex64 = comps.iter().map(|a| a.eval(&z)).product();
                let modulus = den.norm();
                min = min.min(modulus);
                max = max.max(modulus);
                let jac: Complex64 = offsets.iter().product();
                values.push(num.eval(&z) * jac / den);
            }
            Slab {
                sum: pairwise_sum(&values),
                min,
                max,
            }
        })
        .collect();

    let min = slabs.iter().map(|s| s.min).fold(f64::INFINITY, f64::min);
    let scale = slabs.iter().map(|s| s.max).fold(0.0, f64::max);
    if !(min.is_finite() && scale.is_finite()) {
        return Err(Error::NonFinite);
    }
    if min < 1e-8 * scale || scale == 0.0 {
        return Err(Error::NearZeroDenominator { min, scale });
    }
    let sums: Vec<Complex64> = slabs.iter().map(|s| s.sum).collect();
    let total = pairwise_sum(&sums) / (samples as f64).powi(p.n as i32);
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTotal {
    /// Sum over nondegenerate zeroes.
    pub exact: RatFn,
    /// Sum over degenerate zeroes from the contour oracle.
    pub numeric: Complex64,
}

/// Exact sum over nondegenerate zeroes plus numeric sum over degenerate ones.
pub fn residue_total(
    zeroes: &[(RatFn, SquareMatrix)],
    degenerate: &[ResidueProblem],
    radius: f64,
    samples: usize,
) -> Result<ResidueTotal> {
    let mut exact = RatFn::zero();
    for (s, j) in zeroes {
        exact = &exact + &residue_nondegenerate(s, j)?;
    }
    let mut numeric = Complex64::zero();
    for p in degenerate {
        numeric += residue_contour_numeric(p, radius, samples)?;
    }
    Ok(ResidueTotal { exact, numeric })
}
