//! Complex Duistermaat–Heckman check on ℙ¹ for `V = z ∂/∂z`.
//!
//! The left side `∫ ω` is a 2D quadrature on the affine chart; the right side
//! is the residue sum `Σ f(x_ℓ)/J_ℓ` over the zeroes `0` and `∞`, with `f`
//! fitted from `ι_V ω = ∂̄f` on a grid.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::rational::to_f64;
use crate::algebra::RatFn;
use crate::error::{Error, Result};
use crate::localize::zero_sum_identity;
use crate::model::{projective_space_numeric, VarietyModel};

pub type ChartFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A (1,1)-form `g(z, z̄) · (i/2) dz ∧ dz̄` on the affine chart of ℙ¹.
#[derive(Clone)]
pub struct FormOnChart {
    pub g: ChartFn,
    pub decay_order: u32,
}

impl FormOnChart {
    pub fn new(g: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static, decay_order: u32) -> Self {
        FormOnChart {
            g: Arc::new(g),
            decay_order,
        }
    }

    /// `ω_FS = (i/2) dz∧dz̄ / (π (1 + |z|²)²)`, total area 1.
    pub fn fubini_study() -> Self {
        Self::new(|z| Complex64::new(fs_density(z), 0.0), 4)
    }

    pub fn scaled(&self, k: f64) -> Self {
        let g = self.g.clone();
        FormOnChart {
            g: Arc::new(move |z| g(z) * k),
            decay_order: self.decay_order,
        }
    }
}

pub fn fs_density(z: Complex64) -> f64 {
    let s = 1.0 + z.norm_sqr();
    1.0 / (PI * s * s)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton's method on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Quadrature resolution for [`integrate_p1_form_with`].
#[derive(Clone, Copy, Debug)]
pub struct Resolution {
    /// Gauss–Legendre panels on `φ ∈ [0, π/2]`, `r = tan φ`.
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Trapezoid samples in the angle.
    pub angular: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            panels: 16,
            nodes_per_panel: 16,
            angular: 64,
        }
    }
}

fn decay_check(form: &FormOnChart) -> Result<()> {
    if form.decay_order < 3 {
        return Err(Error::InvalidArgument(format!(
            "decay order {} is too small for the form to be integrable",
            form.decay_order
        )));
    }
    let weighted = |r: f64| {
        (0..8)
            .map(|k| (form.g)(Complex64::from_polar(r, TAU * k as f64 / 8.0)).norm() * r.powi(form.decay_order as i32))
            .fold(0.0, f64::max)
    };
    let (near, far) = (weighted(10.0), weighted(1000.0));
    let mid = weighted(100.0);
    if !(near.is_finite() && mid.is_finite() && far.is_finite()) {
        return Err(Error::NonFinite);
    }
    if far > 10.0 * near.max(mid) + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "density does not decay like |z|^-{}",
            form.decay_order
        )));
    }
    Ok(())
}

/// `∫_ℂ g dA` in polar coordinates with `r = tan φ`; real part of the integral.
pub fn integrate_p1_form(form: &FormOnChart) -> Result<f64> {
    integrate_p1_form_with(form, Resolution::default())
}

pub fn integrate_p1_form_with(form: &FormOnChart, res: Resolution) -> Result<f64> {
    decay_check(form)?;
    let rule = gauss_legendre(res.nodes_per_panel);
    let width = FRAC_PI_2 / res.panels as f64;
    let mut panel_sums = Vec::with_capacity(res.panels);
    for p in 0..res.panels {
        let mid = (p as f64 + 0.5) * width;
        let mut s = 0.0;
        for &(x, w) in &rule {
            let phi = mid + 0.5 * width * x;
            let (r, sec) = (phi.tan(), 1.0 / phi.cos());
            let ring: f64 = (0..res.angular)
                .map(|k| (form.g)(Complex64::from_polar(r, TAU * k as f64 / res.angular as f64)).re)
                .sum::<f64>()
                * TAU
                / res.angular as f64;
            let v = ring * r * sec * sec;
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            s += w * v;
        }
        panel_sums.push(s * 0.5 * width);
    }
    Ok(panel_sums.iter().sum())
}

const GRID: usize = 20;
const FD_STEP: f64 = 1e-5;

fn grid() -> impl Iterator<Item = Complex64> {
    let coord = |k: usize| -2.0 + 4.0 * k as f64 / (GRID - 1) as f64;
    (0..GRID).flat_map(move |a| (0..GRID).map(move |b| Complex64::new(coord(a), coord(b))))
}

/// `∂f/∂z̄ = (f_x + i f_y)/2` by central differences.
pub fn dbar(f: &dyn Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
    let h = FD_STEP;
    let fx = (f(z + h) - f(z - h)) / (2.0 * h);
    let fy = (f(z + Complex64::new(0.0, h)) - f(z - Complex64::new(0.0, h))) / (2.0 * h);
    (fx + Complex64::i() * fy) * 0.5
}

/// `ι_V ω = (i/2) g v dz̄` for `V = v(z) ∂/∂z`.
fn contraction(form: &FormOnChart, v: &dyn Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
    Complex64::new(0.0, 0.5) * (form.g)(z) * v(z)
}

/// `max |ι_V ω − ∂̄f|` over a 20×20 grid on `[−2, 2]²`.
pub fn dbar_relation_check(
    form: &FormOnChart,
    f: &dyn Fn(Complex64) -> Complex64,
    v: &dyn Fn(Complex64) -> Complex64,
) -> f64 {
    grid()
        .map(|z| (contraction(form, v, z) - dbar(f, z)).norm())
        .fold(0.0, f64::max)
}

/// Least-squares `c` with `ι_V ω ≈ c ∂̄f₀` on the grid.
pub fn fit_dbar_constant(
    form: &FormOnChart,
    f0: &dyn Fn(Complex64) -> Complex64,
    v: &dyn Fn(Complex64) -> Complex64,
) -> Complex64 {
    let (mut num, mut den) = (Complex64::new(0.0, 0.0), 0.0);
    for z in grid() {
        let b = dbar(f0, z);
        num += b.conj() * contraction(form, v, z);
        den += b.norm_sqr();
    }
    num / den
}

#[derive(Clone, Debug)]
pub struct DhOutcome {
    /// `∫_{ℙ¹} ω` by quadrature.
    pub lhs: f64,
    /// `Σ_ℓ f(x_ℓ)/J_ℓ`.
    pub residue_sum: Complex64,
    /// `(−2πi) Σ_ℓ f(x_ℓ)/J_ℓ`.
    pub rhs: Complex64,
    /// `lhs / Re(rhs)` rounded to ±1.
    pub sign: f64,
    /// Fitted constant in `f = c/(1 + |z|²) + k`.
    pub c: Complex64,
    pub dbar_residual: f64,
    /// `Σ_ℓ 1/J_ℓ`, exact; the coefficient of a constant shift of `f`.
    pub shift_coefficient: RatFn,
}

impl DhOutcome {
    pub fn abs_error(&self) -> f64 {
        (self.lhs.abs() - (self.residue_sum * TAU).norm()).abs()
    }
}

/// The zeroes of `z ∂/∂z` on ℙ¹ with their Jacobians: `0` (J = 1) and `∞` (J = −1).
pub fn dh_model() -> VarietyModel {
    projective_space_numeric(&[0, 1]).expect("distinct weights")
}

/// DH check for `scale · ω_FS` with `f` shifted by the constant `shift`.
pub fn dh_check(scale: f64, shift: Complex64) -> Result<DhOutcome> {
    let form = FormOnChart::fubini_study().scaled(scale);
    let v = |z: Complex64| z;
    let f0 = |z: Complex64| Complex64::new(1.0 / (1.0 + z.norm_sqr()), 0.0);
    let c = fit_dbar_constant(&form, &f0, &v);
    let f = move |z: Complex64| c * f0(z) + shift;
    let dbar_residual = dbar_relation_check(&form, &f, &v);

    let model = dh_model();
    // f(0) = c + k, f(∞) = k.
    let values = [c + shift, shift];
    let mut residue_sum = Complex64::new(0.0, 0.0);
    for (p, fv) in model.points().iter().zip(values) {
        let j = p.tangent_det().constant_value().expect("numeric model");
        residue_sum += fv / to_f64(&j);
    }
    let lhs = integrate_p1_form(&form)?;
    let rhs = Complex64::new(0.0, -TAU) * residue_sum;
    let sign = if lhs * rhs.re >= 0.0 { 1.0 } else { -1.0 };
    Ok(DhOutcome {
        lhs,
        residue_sum,
        rhs,
        sign,
        c,
        dbar_residual,
        shift_coefficient: zero_sum_identity(&model)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre(8);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x14: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((x14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn fubini_study_area() {
        let fs = FormOnChart::fubini_study();
        assert!((integrate_p1_form(&fs).unwrap() - 1.0).abs() < 1e-6);
        assert!((integrate_p1_form(&fs.scaled(2.0)).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn odd_density_integrates_to_zero() {
        let odd = FormOnChart::new(
            |z| {
                let s = z.norm_sqr();
                Complex64::new(fs_density(z) * (1.0 - s) / (1.0 + s), 0.0)
            },
            4,
        );
        let coarse = integrate_p1_form(&odd).unwrap();
        let fine = integrate_p1_form_with(
            &odd,
            Resolution {
                panels: 32,
                ..Resolution::default()
            },
        )
        .unwrap();
        assert!(coarse.abs() < 1e-6 && (coarse - fine).abs() < 1e-6);
    }

    #[test]
    fn radial_refinement_is_stable() {
        let fs = FormOnChart::fubini_study();
        let a = integrate_p1_form(&fs).unwrap();
        let b = integrate_p1_form_with(&fs, Resolution { panels: 32, ..Resolution::default() }).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn slow_decay_is_rejected() {
        let slow = FormOnChart::new(|z| Complex64::new(1.0 / (1.0 + z.norm()), 0.0), 3);
        assert!(integrate_p1_form(&slow).is_err());
        let low = FormOnChart::new(|_| Complex64::new(0.0, 0.0), 2);
        assert!(integrate_p1_form(&low).is_err());
    }

    #[test]
    fn dbar_relation() {
        let fs = FormOnChart::fubini_study();
        let v = |z: Complex64| z;
        let f0 = |z: Complex64| Complex64::new(1.0 / (1.0 + z.norm_sqr()), 0.0);
        let c = fit_dbar_constant(&fs, &f0, &v);
        assert!((c - Complex64::new(0.0, -1.0 / TAU)).norm() < 1e-8, "{c}");
        assert!(dbar_relation_check(&fs, &|z| c * f0(z), &v) <= 1e-6);
        assert!(dbar_relation_check(&fs, &|_| Complex64::new(0.0, 0.0), &v) > 0.01);
        let zero_field = |_: Complex64| Complex64::new(0.0, 0.0);
        assert!(dbar_relation_check(&fs, &|_| Complex64::new(3.0, 0.0), &zero_field) <= 1e-12);
    }

    #[test]
    fn dh_sides_agree_up_to_sign() {
        let base = dh_check(1.0, Complex64::new(0.0, 0.0)).unwrap();
        assert!(base.abs_error() < 1e-4);
        assert_eq!(base.sign, -1.0);
        let tripled = dh_check(3.0, Complex64::new(0.0, 0.0)).unwrap();
        assert!((tripled.lhs / base.lhs - 3.0).abs() < 1e-6);
        assert!((tripled.residue_sum / base.residue_sum - 3.0).norm() < 1e-6);
        let shifted = dh_check(1.0, Complex64::new(2.5, -1.0)).unwrap();
        assert!(shifted.shift_coefficient.is_zero());
        assert!((shifted.residue_sum - base.residue_sum).norm() < 1e-12);
    }
}
