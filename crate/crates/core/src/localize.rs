//! Exact fixed-point sums for the localization formulas.
//!
//! Every formula is evaluated in weight-normalized form. A class of weight
//! `w` evaluated at `t·V` carries `(it/2π)ʷ = (−1)ʷ τ⁻ʷ tʷ` with `τ = 2πi`;
//! the residue prefactor is `(τ/t)ⁿ`. Results report the net `τ` and `t`
//! exponents term by term instead of assuming they cancel.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{FactoredSum, RatFn, SparsePoly, SquareMatrix, Var};
use crate::chern::{bundle_chern_at_point, ChernPoly};
use crate::error::{Error, Result};
use crate::model::{FixedPoint, VarietyModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationResult {
    pub value: RatFn,
    pub per_point: Vec<(String, RatFn)>,
    /// Net power of `τ = 2πi`.
    pub tau_exponent: i32,
    /// Net power of the scaling parameter `t`.
    pub t_exponent: i32,
}

impl LocalizationResult {
    /// The value as a rational number when it has no weight dependence and
    /// the formal units cancelled.
    pub fn constant(&self) -> Option<crate::algebra::Rational> {
        if self.tau_exponent != 0 || self.t_exponent != 0 {
            return None;
        }
        self.value.constant_value()
    }

    /// Exact re-summation of the reported summands.
    pub fn per_point_total(&self) -> RatFn {
        self.per_point.iter().map(|(_, s)| s.clone()).sum()
    }
}

/// A numerator `sign · value · τ^tau · t^t` for [`localization_rhs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub value: RatFn,
    pub tau: i32,
    pub t: i32,
}

impl Normalized {
    /// A weight-`w` characteristic numerator: `(it/2π)ʷ · value`.
    pub fn characteristic(value: RatFn, w: usize) -> Self {
        let value = if w % 2 == 1 { -value } else { value };
        Normalized {
            value,
            tau: -(w as i32),
            t: w as i32,
        }
    }

    /// A bare numerator with no formal units attached.
    pub fn bare(value: RatFn) -> Self {
        Normalized { value, tau: 0, t: 0 }
    }
}

/// One summand `num / Π den`.
struct Summand {
    name: String,
    num: RatFn,
    den: Vec<RatFn>,
}

impl Summand {
    /// `num / det m`, keeping the diagonal factors of triangular matrices apart.
    fn over_det(name: &str, num: RatFn, m: &SquareMatrix) -> Result<Self> {
        let den = if m.is_triangular() { m.diag() } else { vec![m.det()] };
        if den.iter().any(RatFn::is_zero) {
            return Err(Error::Degenerate {
                point: name.to_string(),
            });
        }
        Ok(Summand {
            name: name.to_string(),
            num,
            den,
        })
    }

    fn value(&self) -> RatFn {
        let den = self.den.iter().fold(RatFn::one(), |acc, d| &acc * d);
        self.num.checked_div(&den).expect("nonzero denominator")
    }
}

fn sum_terms(terms: Vec<Summand>) -> (RatFn, Vec<(String, RatFn)>) {
    let mut acc = FactoredSum::new();
    for s in &terms {
        let mut num: SparsePoly = s.num.numer().clone();
        let mut factors: Vec<SparsePoly> = vec![s.num.denom().clone()];
        for d in &s.den {
            num = &num * d.denom();
            factors.push(d.numer().clone());
        }
        acc.push(num, &factors).expect("nonzero denominator");
    }
    let per_point = terms.par_iter().map(|s| (s.name.clone(), s.value())).collect();
    (acc.finish(), per_point)
}

fn collect<F>(m: &VarietyModel, f: F) -> Result<Vec<Summand>>
where
    F: Fn(&FixedPoint) -> Result<Summand> + Sync + Send,
{
    m.points().par_iter().map(f).collect()
}

/// Common `τ` exponent of the terms of `Φ` when each class `c_k` carries
/// `τ⁻ᵏ`; the terms must agree.
fn numerator_weight(phi: &ChernPoly) -> Result<i32> {
    let mut weights = phi.term_weights().into_iter();
    let Some(w) = weights.next() else {
        return Ok(phi.dim() as i32);
    };
    if weights.any(|v| v != w) {
        phi.require_homogeneous()?;
        return Err(Error::MixedNormalization);
    }
    Ok(w as i32)
}

fn check_dims(m: &VarietyModel, phi: &ChernPoly) -> Result<()> {
    if phi.dim() != m.dim() {
        return Err(Error::InvalidArgument(format!(
            "Φ is written for dimension {}, the model has dimension {}",
            phi.dim(),
            m.dim()
        )));
    }
    phi.require_homogeneous()
}

/// `Σ_j Φ(c̃(x_j)) / c̃_n(x_j)`; equals `∫_X Φ(c₁, …, c_n)`.
pub fn bott_sum(m: &VarietyModel, phi: &ChernPoly) -> Result<LocalizationResult> {
    check_dims(m, phi)?;
    let terms = collect(m, |p| {
        Summand::over_det(&p.name, phi.eval(&p.tangent.elementary_symmetric()), &p.tangent)
    })?;
    let (value, per_point) = sum_terms(terms);
    // Numerator classes carry τ^{−w}, the top class in the denominator τ^{−n}.
    let w = numerator_weight(phi)?;
    Ok(LocalizationResult {
        value,
        per_point,
        tau_exponent: -w + m.dim() as i32,
        t_exponent: 0,
    })
}

/// `Σ_j 1 / det 𝕃_j`, which vanishes for the zeroes of a global holomorphic field.
pub fn zero_sum_identity(m: &VarietyModel) -> Result<RatFn> {
    let terms = collect(m, |p| Summand::over_det(&p.name, RatFn::one(), &p.tangent))?;
    Ok(sum_terms(terms).0)
}

/// `(2πi/t)ⁿ Σ_j ν_j / det 𝕃_j` for caller-supplied normalized numerators.
pub fn localization_rhs(
    m: &VarietyModel,
    numerators: &BTreeMap<String, Normalized>,
) -> Result<LocalizationResult> {
    let mut units = None;
    for p in m.points() {
        let nu = numerators.get(&p.name).ok_or_else(|| Error::MissingNumerator {
            point: p.name.clone(),
        })?;
        match units {
            None => units = Some((nu.tau, nu.t)),
            Some(u) if u != (nu.tau, nu.t) => return Err(Error::MixedNormalization),
            Some(_) => {}
        }
    }
    let terms = collect(m, |p| {
        Summand::over_det(&p.name, numerators[&p.name].value.clone(), &p.tangent)
    })?;
    let (value, per_point) = sum_terms(terms);
    let (tau, t) = units.unwrap_or((-(m.dim() as i32), m.dim() as i32));
    let n = m.dim() as i32;
    Ok(LocalizationResult {
        value,
        per_point,
        tau_exponent: n + tau,
        t_exponent: -n + t,
    })
}

/// `∫_X P(c(ℰ))` from the bundle endomorphisms at the zeroes:
/// `(2πi/t)ⁿ Σ_j P((it/2π) 𝕃_{Ṽ,j}) / det 𝕃_{V,j}`.
pub fn carrell_liebermann_sum(m: &VarietyModel, p: &ChernPoly) -> Result<LocalizationResult> {
    check_dims(m, p)?;
    let w = numerator_weight(p)?;
    let sign = w % 2 == 1;
    let terms = collect(m, |pt| {
        let classes = bundle_chern_at_point(pt)?;
        let num = p.eval(&classes);
        Summand::over_det(&pt.name, if sign { -num } else { num }, &pt.tangent)
    })?;
    let (value, per_point) = sum_terms(terms);
    let n = m.dim() as i32;
    Ok(LocalizationResult {
        value,
        per_point,
        tau_exponent: n - w,
        t_exponent: -n + w,
    })
}

/// `∫_X Φ(γ₁, …, γ_n)` for the virtual bundle `Θ − 𝓛*` of a meromorphic field:
/// `Σ_j Φ(e(𝕃_j)) / e_n(𝕃_j)` with `𝕃_j` the twisted Jacobian in the declared
/// trivialization.
pub fn baum_bott_sum(m: &VarietyModel, phi: &ChernPoly) -> Result<LocalizationResult> {
    check_dims(m, phi)?;
    let terms = collect(m, |p| {
        let twist = p.twist_weight.as_ref().ok_or_else(|| Error::MissingTwist {
            point: p.name.clone(),
        })?;
        let l = p.tangent.scale(twist);
        Summand::over_det(&p.name, phi.eval(&l.elementary_symmetric()), &l)
    })?;
    let (value, per_point) = sum_terms(terms);
    let w = numerator_weight(phi)?;
    Ok(LocalizationResult {
        value,
        per_point,
        tau_exponent: -w + m.dim() as i32,
        t_exponent: 0,
    })
}

/// Weight independence checked without relying on canonical reduction: every
/// cleared partial derivative `N' D − N D'` vanishes identically.
pub fn weight_derivatives_vanish(r: &RatFn) -> bool {
    let (n, d) = (r.numer(), r.denom());
    let vars: Vec<Var> = r.vars();
    vars.iter().all(|v| {
        let lhs = &n.derivative(v) * d;
        let rhs = n * &d.derivative(v);
        (&lhs - &rhs).is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{frac, int};
    use crate::model::{build_p1_factored, build_projective_space, projective_space_numeric, symbolic_weights};

    fn phi(text: &str, n: usize) -> ChernPoly {
        ChernPoly::parse(text, n).unwrap()
    }

    fn sym_pn(n: usize) -> VarietyModel {
        build_projective_space(n, &symbolic_weights(n + 1, 0)).unwrap()
    }

    #[test]
    fn top_class_counts_zeroes() {
        for n in 1..=4 {
            let r = bott_sum(&sym_pn(n), &ChernPoly::class(n, n).unwrap()).unwrap();
            assert_eq!(r.constant(), Some(int(n as i64 + 1)));
            assert!(r.per_point.iter().all(|(_, s)| s.is_one()));
        }
    }

    #[test]
    fn bott_symbolic_and_numeric_agree() {
        let sym = bott_sum(&sym_pn(2), &phi("c1^2", 2)).unwrap();
        let num = bott_sum(&projective_space_numeric(&[0, 1, 5]).unwrap(), &phi("c1^2", 2)).unwrap();
        assert_eq!(sym.value, num.value);
        assert_eq!(sym.constant(), Some(int(9)));
        assert_eq!(sym.per_point_total(), sym.value);
    }

    #[test]
    fn zero_sum() {
        assert!(zero_sum_identity(&sym_pn(3)).unwrap().is_zero());
        let single = VarietyModel::new(1, 0, vec![FixedPoint::new("x", SquareMatrix::identity(1))]).unwrap();
        assert!(zero_sum_identity(&single).unwrap().is_one());
    }

    #[test]
    fn carrell_liebermann_line_bundles() {
        for n in 1..=4 {
            let r = carrell_liebermann_sum(&sym_pn(n), &ChernPoly::monomial(n, &[n as u32]).unwrap()).unwrap();
            assert_eq!(r.constant(), Some(int(1)), "n={n}");
            assert_eq!((r.tau_exponent, r.t_exponent), (0, 0));
        }
    }

    #[test]
    fn rhs_units() {
        let m = sym_pn(2);
        let nus: BTreeMap<String, Normalized> = m
            .points()
            .iter()
            .map(|p| (p.name.clone(), Normalized::characteristic(p.line_weight.clone().unwrap().pow(2), 2)))
            .collect();
        let r = localization_rhs(&m, &nus).unwrap();
        assert_eq!(r.constant(), Some(int(1)));

        let mut mixed = nus.clone();
        mixed.insert("p0".into(), Normalized::bare(RatFn::one()));
        assert!(matches!(localization_rhs(&m, &mixed), Err(Error::MixedNormalization)));
        let mut missing = nus;
        missing.remove("p1");
        assert!(matches!(localization_rhs(&m, &missing), Err(Error::MissingNumerator { .. })));
    }

    #[test]
    fn baum_bott_p1() {
        let m = build_p1_factored(&[int(0), int(1), frac(-1, 2)], 1).unwrap();
        let r = baum_bott_sum(&m, &phi("g1", 1)).unwrap();
        assert_eq!(r.constant(), Some(int(3)));
        let untwisted = sym_pn(1);
        assert!(matches!(baum_bott_sum(&untwisted, &phi("g1", 1)), Err(Error::MissingTwist { .. })));
    }

    #[test]
    fn derivative_check() {
        let x = RatFn::var(Var::weight(0));
        assert!(weight_derivatives_vanish(&RatFn::from_int(4)));
        assert!(!weight_derivatives_vanish(&x));
    }
}
