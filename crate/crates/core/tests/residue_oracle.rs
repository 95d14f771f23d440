use num_complex::Complex64;
use proptest::prelude::*;

use loc_calc::algebra::rational::int;
use loc_calc::algebra::{RatFn, SquareMatrix};
use loc_calc::residue::{residue_contour_numeric, residue_nondegenerate, residue_total, ResidueProblem};
use loc_calc::Error;

fn contour(comps: &[&str], s: &str, radius: f64, samples: usize) -> Complex64 {
    residue_contour_numeric(&ResidueProblem::parse(comps, s).unwrap(), radius, samples).unwrap()
}

fn det3(a: [[i64; 3]; 3]) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn linear_form(row: &[i64]) -> String {
    row.iter().enumerate().map(|(k, c)| format!("({c})*z{}", k + 1)).collect::<Vec<_>>().join(" + ")
}

#[test]
fn radius_does_not_matter_inside_the_basin() {
    let comps = ["z1 + z1^2*z2", "z2 - z1*z2"];
    let a = contour(&comps, "3 + z1", 0.5, 256);
    let b = contour(&comps, "3 + z1", 0.8, 256);
    assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    assert!((a - 3.0).norm() < 1e-9);
}

#[test]
fn doubling_samples_converges() {
    let comps = ["z1^2 + z2^3", "z2^2 + z1^3"];
    let p = ResidueProblem::parse(&comps, "1 + z1*z2").unwrap();
    let a = residue_contour_numeric(&p, 0.5, 256).unwrap();
    let b = residue_contour_numeric(&p, 0.5, 512).unwrap();
    assert!((a - b).norm() < 1e-10, "{a} vs {b}");
}

#[test]
fn separable_laurent_values() {
    // res z1^a z2^b / (z1^3 z2^2) picks the coefficient of z1² z2¹.
    let v = contour(&["z1^3", "z2^2"], "5*z1^2*z2 + z1 + 7", 0.5, 256);
    assert!((v - 5.0).norm() < 1e-9);
    let v = contour(&["z1^3", "z2^2"], "z1*z2", 0.5, 256);
    assert!(v.norm() < 1e-9);
    let v = contour(&["z1*(1 - z1)"], "1", 0.5, 256);
    assert!((v - 1.0).norm() < 1e-9);
}

#[test]
fn complex_numerators_use_i() {
    let v = contour(&["z1"], "2 + 3*i", 0.5, 64);
    assert!((v - Complex64::new(2.0, 3.0)).norm() < 1e-12);
}

#[test]
fn degenerate_denominators_on_the_contour_are_refused() {
    let p = ResidueProblem::parse(&["z1 - z2", "z2"], "1").unwrap();
    assert!(matches!(
        residue_contour_numeric(&p, 0.5, 64),
        Err(Error::NearZeroDenominator { .. })
    ));
}

#[test]
fn bad_parameters_are_usage_errors() {
    let p = ResidueProblem::parse(&["z1"], "1").unwrap();
    for (r, s) in [(0.5, 100), (0.5, 32), (-1.0, 64), (f64::NAN, 64)] {
        assert!(residue_contour_numeric(&p, r, s).unwrap_err().is_usage());
    }
    assert!(ResidueProblem::parse(&["z1 + 1"], "1").is_err());
    assert!(ResidueProblem::parse(&["z1", "z2", "z3", "z4"], "1")
        .map(|p| residue_contour_numeric(&p, 0.5, 64))
        .unwrap()
        .is_err());
}

#[test]
fn exact_and_numeric_parts_combine() {
    let j = SquareMatrix::from_rows(vec![vec![RatFn::from_int(2), RatFn::one()], vec![RatFn::zero(), RatFn::from_int(3)]]).unwrap();
    let degenerate = ResidueProblem::parse(&["z1^2"], "z1").unwrap();
    let t = residue_total(&[(RatFn::from_int(12), j.clone())], &[degenerate], 0.5, 64).unwrap();
    assert_eq!(t.exact, RatFn::from_int(2));
    assert!((t.numeric - 1.0).norm() < 1e-12);
    let singular = SquareMatrix::from_rows(vec![vec![RatFn::one(), RatFn::one()], vec![RatFn::one(), RatFn::one()]]).unwrap();
    assert!(residue_nondegenerate(&RatFn::one(), &singular).is_err());
    assert_eq!(residue_nondegenerate(&RatFn::from_int(6), &j).unwrap(), RatFn::constant(int(1)));
}

fn dominant_matrix() -> impl Strategy<Value = [[i64; 3]; 3]> {
    prop::collection::vec(-3i64..=3, 9).prop_map(|v| {
        let mut a = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = v[3 * i + j];
            }
            let off: i64 = (0..3).filter(|&j| j != i).map(|j| a[i][j].abs()).sum();
            a[i][i] = off + 1 + a[i][i].abs();
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linear_residue_is_constant_over_det(a in dominant_matrix(), sigma in -5i64..=5, beta in -3i64..=3) {
        let comps: Vec<String> = a.iter().map(|r| linear_form(r)).collect();
        let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
        let s = format!("{sigma} + ({beta})*z2");
        let v = contour(&refs, &s, 0.5, 64);
        let expected = sigma as f64 / det3(a) as f64;
        prop_assert!((v - expected).norm() < 1e-9, "{} vs {}", v, expected);
    }

    #[test]
    fn residue_is_linear_in_the_numerator(c1 in -4i64..=4, c2 in -4i64..=4) {
        let comps = ["z1^2 - z2", "z2^2"];
        let f = contour(&comps, "1 + z1", 0.5, 128);
        let g = contour(&comps, "z1^2 + 2*z2", 0.5, 128);
        let h = contour(&comps, &format!("({c1})*(1 + z1) + ({c2})*(z1^2 + 2*z2)"), 0.5, 128);
        prop_assert!((h - (f * c1 as f64 + g * c2 as f64)).norm() < 1e-9);
    }
}
