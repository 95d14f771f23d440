//! Acceptance criteria 1–9. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use loc_calc::algebra::rational::{frac, int, to_f64, Rational};
use loc_calc::algebra::{RatFn, Var};
use loc_calc::chern::{chern_numbers_pn, virtual_chern_numbers_pn, ChernPoly};
use loc_calc::localize::{
    baum_bott_sum, bott_sum, carrell_liebermann_sum, weight_derivatives_vanish, zero_sum_identity,
};
use loc_calc::model::{
    build_p1_factored, build_product, build_projective_space, build_projective_space_with,
    rational_weights, symbolic_weights, LinearizationConvention, VarietyModel,
};
use loc_calc::residue::{residue_contour_numeric, ResidueProblem, DEFAULT_RADIUS, DEFAULT_SAMPLES};
use loc_calc::verify::{
    degenerate_cases, dh_check, random_distinct_rationals, random_linear_residue, run_suite,
    weight_monomials, Status, SuiteConfig, DBAR_TOL, DH_TOL, RESIDUE_DEGENERATE_TOL, RESIDUE_REL_TOL,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn sym_pn(n: usize) -> VarietyModel {
    build_projective_space(n, &symbolic_weights(n + 1, 0)).unwrap()
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 1..=6 {
        if !zero_sum_identity(&sym_pn(n)).unwrap().is_zero() {
            failures.push(format!("P{n}"));
        }
    }
    for (a, b) in [(1, 1), (1, 2)] {
        let pa = build_projective_space(a, &symbolic_weights(a + 1, 0)).unwrap();
        let pb = build_projective_space(b, &symbolic_weights(b + 1, a + 1)).unwrap();
        if !zero_sum_identity(&build_product(&pa, &pb).unwrap()).unwrap().is_zero() {
            failures.push(format!("P{a}xP{b}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..100 {
        let n = 1 + k % 4;
        let w = random_distinct_rationals(&mut rng, n + 1);
        let m = build_projective_space(n, &rational_weights(&w)).unwrap();
        if !zero_sum_identity(&m).unwrap().is_zero() {
            failures.push(format!("random #{k}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures.is_empty() && within(elapsed, 10),
        format!(
            "Σ 1/det 𝕃 = 0 for symbolic P1..P6, P1xP1, P1xP2 and 100 seeded numeric models; failures {:?}; {:.2?} (limit 10 s)",
            failures, elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut values = Vec::new();
    let mut pass = true;
    for n in 1..=5 {
        let r = bott_sum(&sym_pn(n), &ChernPoly::class(n, n).unwrap()).unwrap();
        let v = r.constant();
        pass &= v == Some(int(n as i64 + 1));
        values.push(format!("P{n}: {}", r.value));
    }
    outcome(pass, format!("bott_sum(Pn, c_n) = n+1; {}", values.join(", ")))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cases = [(2, "c1^2", 9), (2, "c2", 3), (3, "c1^3", 64), (3, "c1*c2", 24), (3, "c3", 4)];
    let mut pass = true;
    let mut values = Vec::new();
    for (n, text, expected) in cases {
        let phi = ChernPoly::parse(text, n).unwrap();
        let bott = bott_sum(&sym_pn(n), &phi).unwrap().constant();
        let oracle = chern_numbers_pn(n, &phi).unwrap();
        pass &= bott.as_ref() == Some(&oracle) && oracle == int(expected);
        values.push(format!("{text} on P{n}: {}", bott.map_or("non-constant".into(), |v| v.to_string())));
    }
    let elapsed = start.elapsed();
    outcome(
        pass && within(elapsed, 5),
        format!("{}; expected 9, 3, 64, 24, 4; {:.2?} (limit 5 s)", values.join(", "), elapsed),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut count = 0;
    for n in 1..=3 {
        let m = sym_pn(n);
        for exps in weight_monomials(n) {
            let r = bott_sum(&m, &ChernPoly::monomial(n, &exps).unwrap()).unwrap();
            pass &= weight_derivatives_vanish(&r.value) && r.value.is_constant();
            count += 1;
        }
    }
    outcome(pass, format!("{count} weight-n monomials on P1..P3: all cleared ∂/∂λ_i vanish"))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut values = Vec::new();
    for n in 1..=3usize {
        let p = ChernPoly::monomial(n, &[n as u32]).unwrap();
        for d in 0..=3i64 {
            let m = sym_pn(n)
                .with_line_weights(|pt| pt.line_weight.clone().unwrap().scale(&int(d)))
                .unwrap();
            let v = carrell_liebermann_sum(&m, &p).unwrap().constant();
            pass &= v == Some(int(d.pow(n as u32)));
            values.push(v.map_or("?".into(), |v| v.to_string()));
        }
        let s = RatFn::var(Var::new("s"));
        let shifted = sym_pn(n)
            .with_line_weights(|pt| &pt.line_weight.clone().unwrap().scale(&int(3)) + &s)
            .unwrap();
        pass &= carrell_liebermann_sum(&shifted, &p).unwrap().constant() == Some(int(3i64.pow(n as u32)));
    }
    outcome(
        pass,
        format!("∫ c₁(𝒪(d))ⁿ = dⁿ for n ≤ 3, d ≤ 3: [{}]; shift c_j → c_j + s invariant", values.join(", ")),
    )
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut values = Vec::new();
    let phi = ChernPoly::parse("g1", 1).unwrap();
    for d in 0..=4u32 {
        // distinct rationals, not evenly spaced
        let roots: Vec<Rational> = (0..d as i64 + 2).map(|k| frac(k * k - 2, k + 1)).collect();
        let m = build_p1_factored(&roots, d).unwrap();
        let r = baum_bott_sum(&m, &phi).unwrap();
        let oracle = virtual_chern_numbers_pn(1, d as i64, &phi).unwrap();
        pass &= r.tau_exponent == 0 && r.t_exponent == 0;
        pass &= r.value.constant_value() == Some(oracle.clone()) && oracle == int(2 + d as i64);
        values.push(r.value.to_string());
    }
    outcome(pass, format!("baum_bott_sum(γ₁) on P1, d = 0..4: [{}] = 2+d; τ, t exponents 0", values.join(", ")))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel: f64 = 0.0;
    for k in 0..20 {
        let (p, exact) = random_linear_residue(&mut rng, 1 + k % 2);
        let num = residue_contour_numeric(&p, DEFAULT_RADIUS, DEFAULT_SAMPLES).unwrap();
        let e = to_f64(&exact);
        worst_rel = worst_rel.max((num - Complex64::new(e, 0.0)).norm() / e.abs());
    }
    let mut worst_deg: f64 = 0.0;
    for (comps, s, expect) in degenerate_cases() {
        let p = ResidueProblem::parse(&comps, s).unwrap();
        let num = residue_contour_numeric(&p, DEFAULT_RADIUS, DEFAULT_SAMPLES).unwrap();
        worst_deg = worst_deg.max((num - Complex64::new(expect, 0.0)).norm());
    }
    let elapsed = start.elapsed();
    outcome(
        worst_rel <= RESIDUE_REL_TOL && worst_deg <= RESIDUE_DEGENERATE_TOL && within(elapsed, 30),
        format!(
            "20 seeded linear problems: max rel error {worst_rel:.2e} (tol {RESIDUE_REL_TOL:e}); degenerate: max abs error {worst_deg:.2e} (tol {RESIDUE_DEGENERATE_TOL:e}); {elapsed:.2?} (limit 30 s)"
        ),
    )
}

fn criterion_8() -> Outcome {
    let base = dh_check(1.0, Complex64::new(0.0, 0.0)).unwrap();
    let shifted = dh_check(1.0, Complex64::new(-4.0, 0.0)).unwrap();
    let suite = run_suite(&SuiteConfig::default());
    let report = suite.iter().find(|r| r.name.starts_with("dh/")).unwrap();
    let pass = base.abs_error() <= DH_TOL
        && base.dbar_residual <= DBAR_TOL
        && shifted.shift_coefficient.is_zero()
        && report.status == Status::Pass
        && report.note.contains("calibrated sign");
    outcome(
        pass,
        format!(
            "|∫ω| = {:.9}, |2πΣf/J| = {:.9}, error {:.2e} (tol {DH_TOL:e}); Σ1/J = {} exactly; calibrated sign {:+} recorded in report",
            base.lhs.abs(),
            (base.residue_sum * std::f64::consts::TAU).norm(),
            base.abs_error(),
            shifted.shift_coefficient,
            base.sign
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut values = Vec::new();
    for n in 1..=4usize {
        let p = ChernPoly::monomial(n, &[n as u32]).unwrap();
        let good = build_projective_space_with(n, &symbolic_weights(n + 1, 0), LinearizationConvention::Jacobian).unwrap();
        let bad = build_projective_space_with(n, &symbolic_weights(n + 1, 0), LinearizationConvention::Bracket).unwrap();
        let good_v = carrell_liebermann_sum(&good, &p).unwrap().constant();
        let bad_v = carrell_liebermann_sum(&bad, &p).unwrap().constant();
        let sign = if n % 2 == 0 { int(1) } else { int(-1) };
        pass &= good_v == Some(int(1)) && bad_v == Some(sign);
        values.push(format!("P{n}: {}", bad_v.map_or("?".into(), |v| v.to_string())));
    }
    let config = SuiteConfig {
        convention: LinearizationConvention::Bracket,
        ..SuiteConfig::default()
    };
    let suite = run_suite(&config);
    let hyper = |n: usize| suite.iter().find(|r| r.name == format!("cl/P{n}/hyperplane")).unwrap();
    pass &= hyper(1).status == Status::Fail && hyper(3).status == Status::Fail && hyper(2).status == Status::Pass;
    pass &= run_suite(&SuiteConfig::default()).iter().all(|r| r.status == Status::Pass);
    outcome(
        pass,
        format!(
            "flipped convention gives ∫ c₁(𝒪(1))ⁿ = (−1)ⁿ: {}; suite flags the odd-n scenarios, default suite passes",
            values.join(", ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

/// Runs without the libtest harness so the criterion lines always reach stdout.
fn main() {
    let criteria: [Criterion; 9] = [
        ("zero identity", criterion_1),
        ("Euler count", criterion_2),
        ("Bott Chern numbers vs cohomology ring", criterion_3),
        ("symbolic weight independence", criterion_4),
        ("Carrell-Liebermann", criterion_5),
        ("Baum-Bott", criterion_6),
        ("residue oracle agreement", criterion_7),
        ("complex Duistermaat-Heckman", criterion_8),
        ("deliberate-fault detection", criterion_9),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("criterion {} ({name}): {} | {}", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: 9/9 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
