//! Built-in scenario suite: each scenario compares a localization sum with an
//! independent computation and reports pass/fail with its tolerance.

pub mod dh;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::rational::{self, frac, int, Rational};
use crate::algebra::{RatFn, SparsePoly, SquareMatrix, Var};
use crate::chern::{chern_numbers_pn, virtual_chern_numbers_pn, ChernPoly};
use crate::error::Result;
use crate::localize::{
    baum_bott_sum, bott_sum, carrell_liebermann_sum, weight_derivatives_vanish, zero_sum_identity,
    LocalizationResult,
};
use crate::model::{
    build_p1_factored, build_p2_split_section, build_product, build_projective_space_with,
    rational_weights, symbolic_weights, validate, LinearizationConvention, Severity, VarietyModel,
};
use crate::residue::{residue_contour_numeric, residue_nondegenerate, ComplexPoly, ResidueProblem};

pub use dh::{dbar_relation_check, dh_check, integrate_p1_form, DhOutcome, FormOnChart};

/// Tolerances of the numeric scenarios.
pub const RESIDUE_REL_TOL: f64 = 1e-9;
pub const RESIDUE_DEGENERATE_TOL: f64 = 1e-8;
pub const DH_TOL: f64 = 1e-4;
pub const DBAR_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Float(f64),
    Exact(String),
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value::Exact(rational::display(r))
    }
}

impl From<&RatFn> for Value {
    fn from(r: &RatFn) -> Self {
        Value::Exact(r.to_string())
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Float(x) => write!(f, "{x:.12}"),
            Value::Exact(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub lhs: Value,
    pub rhs: Value,
    /// `None` when the values are not both numeric.
    pub abs_error: Option<f64>,
    pub tolerance: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(default)]
    pub elapsed_ms: u64,
}

impl ScenarioReport {
    /// Exact comparison; passes iff `lhs == rhs`.
    pub fn exact(name: impl Into<String>, lhs: &RatFn, rhs: &RatFn, note: impl Into<String>) -> Self {
        let diff = lhs - rhs;
        let abs_error = diff.constant_value().map(|d| rational::to_f64(&rational::abs(&d)));
        ScenarioReport {
            name: name.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            abs_error,
            tolerance: 0.0,
            status: if diff.is_zero() { Status::Pass } else { Status::Fail },
            note: note.into(),
            elapsed_ms: 0,
        }
    }

    /// Numeric comparison; passes iff `|lhs − rhs| ≤ tolerance`.
    pub fn numeric(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, note: impl Into<String>) -> Self {
        let err = (lhs - rhs).abs();
        ScenarioReport {
            name: name.into(),
            lhs: Value::Float(lhs),
            rhs: Value::Float(rhs),
            abs_error: Some(err),
            tolerance,
            status: if err <= tolerance { Status::Pass } else { Status::Fail },
            note: note.into(),
            elapsed_ms: 0,
        }
    }

    fn failed(name: &str, message: String) -> Self {
        ScenarioReport {
            name: name.to_string(),
            lhs: Value::Exact("error".into()),
            rhs: Value::Exact("-".into()),
            abs_error: None,
            tolerance: 0.0,
            status: Status::Fail,
            note: message,
            elapsed_ms: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteConfig {
    /// Tangent convention used by every ℙⁿ built by the suite.
    pub convention: LinearizationConvention,
    /// Additional models checked for validity and the zero-sum identity.
    pub extra_models: Vec<(String, VarietyModel)>,
    /// Samples per circle for the residue oracle.
    pub samples: Option<usize>,
}

type Scenario = Box<dyn Fn(&SuiteConfig) -> Result<ScenarioReport> + Send + Sync>;

fn scenario(name: impl Into<String>, f: impl Fn(&SuiteConfig) -> Result<ScenarioReport> + Send + Sync + 'static) -> (String, Scenario) {
    (name.into(), Box::new(f))
}

/// Symbolic ℙⁿ in the suite's convention.
pub fn symbolic_pn(n: usize, convention: LinearizationConvention) -> VarietyModel {
    build_projective_space_with(n, &symbolic_weights(n + 1, 0), convention).expect("distinct weights")
}

fn constant(r: &LocalizationResult) -> RatFn {
    // A result with uncancelled τ or t is reported as such, never as its bare value.
    if r.tau_exponent != 0 || r.t_exponent != 0 {
        let tau = Var::new("tau");
        let mut v = r.value.clone();
        let factor = |var: &Var, e: i32| {
            let p = RatFn::var(var.clone()).pow(e.unsigned_abs());
            if e < 0 {
                p.inv().expect("nonzero")
            } else {
                p
            }
        };
        v = &v * &factor(&tau, r.tau_exponent);
        v = &v * &factor(&Var::t(), r.t_exponent);
        return v;
    }
    r.value.clone()
}

/// All monomials `Π c_i^{m_i}` with `Σ i·m_i = n`.
pub fn weight_monomials(n: usize) -> Vec<Vec<u32>> {
    fn go(n: usize, largest: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=largest.min(n)).rev() {
            prefix[k - 1] += 1;
            go(n - k, k, prefix, out);
            prefix[k - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut vec![0; n], &mut out);
    out
}

/// `count` distinct rationals with small numerators and denominators.
pub fn random_distinct_rationals(rng: &mut impl Rng, count: usize) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let r = frac(rng.gen_range(-20..=20), rng.gen_range(1..=5));
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

fn random_nonzero(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Rational {
    loop {
        let r = frac(rng.gen_range(lo..=hi), rng.gen_range(1..=den));
        if !r.is_zero() {
            return r;
        }
    }
}

/// A seeded nondegenerate linear residue problem `a = A z`, `s = σ + ⟨β, z⟩`,
/// with `A` strictly diagonally dominant so the torus `|z_k| = r` is
/// homologous to the residue cycle. Returns the problem and `σ / det A`.
pub fn random_linear_residue(rng: &mut impl Rng, n: usize) -> (ResidueProblem, Rational) {
    let z = |k: usize| SparsePoly::named(&format!("z{}", k + 1));
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<Rational> = (0..n)
            .map(|j| {
                if i == j {
                    let mag = frac(rng.gen_range(2..=9) * 4 + rng.gen_range(0..4), 4);
                    if rng.gen_bool(0.5) { -mag } else { mag }
                } else {
                    frac(rng.gen_range(-4..=4), 4)
                }
            })
            .collect();
        rows.push(row);
    }
    let comps: Vec<ComplexPoly> = rows
        .iter()
        .map(|row| {
            let p = row.iter().enumerate().fold(SparsePoly::zero(), |acc, (j, a)| &acc + &z(j).scale(a));
            ComplexPoly::from_real(p)
        })
        .collect();
    let sigma = random_nonzero(rng, -9, 9, 3);
    let mut s = SparsePoly::constant(sigma.clone());
    for j in 0..n {
        s = &s + &z(j).scale(&frac(rng.gen_range(-5..=5), 2));
    }
    let det = SquareMatrix::from_rationals(&rows).expect("square").det();
    let exact = residue_nondegenerate(&RatFn::constant(sigma), &SquareMatrix::diagonal(vec![det]))
        .expect("diagonally dominant matrices are invertible")
        .constant_value()
        .expect("numeric");
    let problem = ResidueProblem::new(comps, ComplexPoly::from_real(s)).expect("linear forms vanish at 0");
    (problem, exact)
}

/// Degenerate separable residue problems with their Laurent values.
pub fn degenerate_cases() -> Vec<(Vec<&'static str>, &'static str, f64)> {
    vec![
        (vec!["z1^2"], "z1", 1.0),
        (vec!["z1^3"], "z1^2 + 5*z1", 1.0),
        (vec!["z1^2"], "1", 0.0),
        (vec!["z1^2", "z2^3"], "z1*z2^2", 1.0),
        (vec!["z1^3", "z2^2"], "z1^2*z2 + 3*z1", 1.0),
        (vec!["z1^2", "z2^2"], "1 + z1", 0.0),
    ]
}

/// ℙ¹ roots for the Baum–Bott scenarios: `d + 2` distinct halves.
pub fn p1_roots(d: u32) -> Vec<Rational> {
    (0..d as i64 + 2).map(|k| frac(3 * k - d as i64 - 1, 2)).collect()
}

fn scenarios(config: &SuiteConfig) -> Vec<(String, Scenario)> {
    let mut list: Vec<(String, Scenario)> = Vec::new();

    for n in 1..=6 {
        list.push(scenario(format!("zero-sum/P{n}"), move |c| {
            let m = symbolic_pn(n, c.convention);
            Ok(ScenarioReport::exact("", &zero_sum_identity(&m)?, &RatFn::zero(), "symbolic weights"))
        }));
    }
    for (a, b) in [(1, 1), (1, 2)] {
        list.push(scenario(format!("zero-sum/P{a}xP{b}"), move |c| {
            let pa = build_projective_space_with(a, &symbolic_weights(a + 1, 0), c.convention)?;
            let pb = build_projective_space_with(b, &symbolic_weights(b + 1, a + 1), c.convention)?;
            let m = build_product(&pa, &pb)?;
            Ok(ScenarioReport::exact("", &zero_sum_identity(&m)?, &RatFn::zero(), "symbolic weights"))
        }));
    }
    list.push(scenario("zero-sum/random", |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut worst = RatFn::zero();
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let w = random_distinct_rationals(&mut rng, n + 1);
            let m = build_projective_space_with(n, &rational_weights(&w), c.convention)?;
            let s = zero_sum_identity(&m)?;
            if !s.is_zero() {
                worst = s;
            }
        }
        Ok(ScenarioReport::exact("", &worst, &RatFn::zero(), "100 seeded numeric-weight models, n ≤ 4"))
    }));

    for n in 1..=5 {
        list.push(scenario(format!("euler/P{n}"), move |c| {
            let r = bott_sum(&symbolic_pn(n, c.convention), &ChernPoly::class(n, n)?)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::from_int(n as i64 + 1), "Φ = c_n"))
        }));
    }

    for (n, text) in [(2, "c1^2"), (2, "c2"), (3, "c1^3"), (3, "c1*c2"), (3, "c3")] {
        list.push(scenario(format!("bott/P{n}/{text}"), move |c| {
            let phi = ChernPoly::parse(text, n)?;
            let r = bott_sum(&symbolic_pn(n, c.convention), &phi)?;
            let oracle = chern_numbers_pn(n, &phi)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::constant(oracle), "cohomology ring of ℙⁿ"))
        }));
    }

    for n in 1..=3 {
        list.push(scenario(format!("weight-independence/P{n}"), move |c| {
            let m = symbolic_pn(n, c.convention);
            let mut bad = Vec::new();
            let monomials = weight_monomials(n);
            for exps in &monomials {
                let phi = ChernPoly::monomial(n, exps)?;
                let r = bott_sum(&m, &phi)?;
                if !(weight_derivatives_vanish(&r.value) && r.value.is_constant()) {
                    bad.push(phi.to_string());
                }
            }
            let lhs = RatFn::from_int(bad.len() as i64);
            let note = if bad.is_empty() {
                format!("all {} monomials of weight {n}", monomials.len())
            } else {
                format!("weight-dependent: {}", bad.join(", "))
            };
            Ok(ScenarioReport::exact("", &lhs, &RatFn::zero(), note))
        }));
    }

    for n in 1..=3usize {
        for d in 0..=3i64 {
            list.push(scenario(format!("cl/P{n}/O({d})"), move |c| {
                let m = symbolic_pn(n, c.convention)
                    .with_line_weights(|p| p.line_weight.clone().expect("ℙⁿ carries 𝒪(1)").scale(&int(d)))?;
                let r = carrell_liebermann_sum(&m, &ChernPoly::monomial(n, &[n as u32])?)?;
                Ok(ScenarioReport::exact("", &constant(&r), &RatFn::from_int(d.pow(n as u32)), "P = c₁ⁿ, c_j = dλ_j"))
            }));
        }
        list.push(scenario(format!("cl/P{n}/shift"), move |c| {
            let s = RatFn::var(Var::new("s"));
            let m = symbolic_pn(n, c.convention).with_line_weights(|p| {
                &p.line_weight.clone().expect("ℙⁿ carries 𝒪(1)").scale(&int(2)) + &s
            })?;
            let r = carrell_liebermann_sum(&m, &ChernPoly::monomial(n, &[n as u32])?)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::from_int(1 << n), "c_j = 2λ_j + s, symbolic s"))
        }));
        list.push(scenario(format!("cl/P{n}/trivial"), move |c| {
            let m = symbolic_pn(n, c.convention).with_line_weights(|_| RatFn::constant(frac(7, 3)))?;
            let r = carrell_liebermann_sum(&m, &ChernPoly::monomial(n, &[n as u32])?)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::zero(), "ℰ = 𝒪, constant weight"))
        }));
        list.push(scenario(format!("cl/P{n}/hyperplane"), move |c| {
            let r = carrell_liebermann_sum(&symbolic_pn(n, c.convention), &ChernPoly::monomial(n, &[n as u32])?)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::one(), "∫ c₁(𝒪(1))ⁿ"))
        }));
    }

    for d in 0..=4u32 {
        list.push(scenario(format!("baum-bott/P1/d={d}"), move |_| {
            let m = build_p1_factored(&p1_roots(d), d)?;
            let phi = ChernPoly::parse("g1", 1)?;
            let r = baum_bott_sum(&m, &phi)?;
            let oracle = virtual_chern_numbers_pn(1, d as i64, &phi)?;
            Ok(ScenarioReport::exact("", &constant(&r), &RatFn::constant(oracle), "Φ = γ₁, factored field"))
        }));
    }
    for d in 0..=2u32 {
        for text in ["g1^2", "g2"] {
            list.push(scenario(format!("baum-bott/P2/d={d}/{text}"), move |_| {
                let m = build_p2_split_section(d)?;
                let phi = ChernPoly::parse(text, 2)?;
                let r = baum_bott_sum(&m, &phi)?;
                let oracle = virtual_chern_numbers_pn(2, d as i64, &phi)?;
                Ok(ScenarioReport::exact("", &constant(&r), &RatFn::constant(oracle), "split section of Θ⊗𝒪(d)"))
            }));
        }
    }

    list.push(scenario("residue/linear", |c| {
        let samples = c.samples.unwrap_or_else(crate::residue::default_samples);
        let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            let (p, exact) = random_linear_residue(&mut rng, 1 + k % 2);
            let num = residue_contour_numeric(&p, crate::residue::DEFAULT_RADIUS, samples)?;
            let e = rational::to_f64(&exact);
            worst = worst.max((num - Complex64::new(e, 0.0)).norm() / e.abs());
        }
        Ok(ScenarioReport::numeric("", worst, 0.0, RESIDUE_REL_TOL, "max relative error over 20 seeded problems, n = 1, 2"))
    }));
    list.push(scenario("residue/degenerate", |c| {
        let samples = c.samples.unwrap_or_else(crate::residue::default_samples);
        let mut worst: f64 = 0.0;
        for (comps, s, expect) in degenerate_cases() {
            let p = ResidueProblem::parse(&comps, s)?;
            let num = residue_contour_numeric(&p, crate::residue::DEFAULT_RADIUS, samples)?;
            worst = worst.max((num - Complex64::new(expect, 0.0)).norm());
        }
        Ok(ScenarioReport::numeric("", worst, 0.0, RESIDUE_DEGENERATE_TOL, "max absolute error, separable z², z³ cases"))
    }));
    list.push(scenario("residue/p1-field", |_| {
        // z(z − 1) ∂/∂z: Jacobians are the derivative 2z − 1 at the zeroes.
        let z = SparsePoly::named("z");
        let field = &z * &(&z - &SparsePoly::one());
        let deriv = field.derivative(&Var::new("z"));
        let mut total = RatFn::zero();
        for root in [Rational::zero(), Rational::one()] {
            let at: BTreeMap<Var, Rational> = [(Var::new("z"), root)].into();
            let j = deriv.eval_partial(&at);
            total = &total + &residue_nondegenerate(&RatFn::one(), &SquareMatrix::diagonal(vec![RatFn::from_poly(j)]))?;
        }
        Ok(ScenarioReport::exact("", &total, &RatFn::zero(), "zeroes 0, 1 with J = −1, 1"))
    }));

    list.push(scenario("dh/P1/fubini-study", |_| {
        let o = dh_check(1.0, Complex64::new(0.0, 0.0))?;
        let shifted = dh_check(1.0, Complex64::new(1.5, 0.0))?;
        let mut report = ScenarioReport::numeric(
            "",
            o.lhs.abs(),
            (o.residue_sum * std::f64::consts::TAU).norm(),
            DH_TOL,
            format!(
                "|∫ω| vs |2π Σ f/J|; calibrated sign {:+} (lhs = {:+}·(−2πi)Σf/J, rhs = {:.9}{:+.9}i); f = c/(1+|z|²), c = {:.9}{:+.9}i, ∂̄ residual {:.2e}; Σ1/J = {}",
                o.sign, o.sign, o.rhs.re, o.rhs.im, o.c.re, o.c.im, o.dbar_residual, o.shift_coefficient
            ),
        );
        let shift_ok = shifted.shift_coefficient.is_zero();
        if o.dbar_residual > DBAR_TOL || !shift_ok {
            report.status = Status::Fail;
        }
        Ok(report)
    }));

    for (name, m) in &config.extra_models {
        let m = m.clone();
        list.push(scenario(format!("model/{name}"), move |_| {
            let report = validate(&m);
            if m.points().is_empty() {
                let mut r = ScenarioReport::exact("", &RatFn::zero(), &RatFn::zero(), "no zeroes: localization sums vanish");
                r.status = Status::Warn;
                return Ok(r);
            }
            if !report.is_valid() {
                let msgs: Vec<String> = report
                    .issues
                    .iter()
                    .filter(|i| i.severity == Severity::Error)
                    .map(|i| format!("{}: {}", i.point.as_deref().unwrap_or("-"), i.message))
                    .collect();
                return Ok(ScenarioReport::failed("", msgs.join("; ")));
            }
            let s = zero_sum_identity(&m)?;
            let mut r = ScenarioReport::exact("", &s, &RatFn::zero(), "Σ 1/det 𝕃");
            if r.status == Status::Fail {
                r.status = Status::Warn;
                r.note = "Σ 1/det 𝕃 ≠ 0: data does not come from a global holomorphic field".into();
            }
            Ok(r)
        }));
    }
    list
}

/// Runs every scenario; failures and panics are recorded, never propagated.
pub fn run_suite(config: &SuiteConfig) -> Vec<ScenarioReport> {
    scenarios(config)
        .into_par_iter()
        .map(|(name, run)| {
            let start = Instant::now();
            let outcome = catch_unwind(AssertUnwindSafe(|| run(config)));
            let mut report = match outcome {
                Ok(Ok(r)) => r,
                Ok(Err(e)) => ScenarioReport::failed(&name, e.to_string()),
                Err(_) => ScenarioReport::failed(&name, "scenario panicked".into()),
            };
            report.name = name;
            report.elapsed_ms = start.elapsed().as_millis() as u64;
            report
        })
        .collect()
}

/// Sign check used by the deliberate-fault scenario: `(−1)ⁿ`.
pub fn sign_power(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// True if `r` is a nonzero rational.
pub fn is_nonzero_constant(r: &RatFn) -> bool {
    r.constant_value().is_some_and(|c| c.is_positive() || c.is_negative())
}
