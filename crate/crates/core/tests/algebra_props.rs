use proptest::prelude::*;

use loc_calc::algebra::rational::{frac, Rational};
use loc_calc::algebra::{gcd, RatFn, SparsePoly, SquareMatrix, Var};

/// Laplace expansion along the first row.
fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::from_integer(1.into());
    }
    let mut total = Rational::from_integer(0.into());
    for j in 0..n {
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &m[0][j] * cofactor_det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| frac(p, q))
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    prop::collection::vec(prop::collection::vec(rational(), n), n)
}

fn poly() -> impl Strategy<Value = SparsePoly> {
    let x = SparsePoly::named("x");
    let y = SparsePoly::named("y");
    prop::collection::vec((rational(), 0u32..3, 0u32..3), 1..4).prop_map(move |terms| {
        terms.into_iter().fold(SparsePoly::zero(), |acc, (c, a, b)| {
            &acc + &(&x.pow(a) * &y.pow(b)).scale(&c)
        })
    })
}

fn to_matrix(rows: &[Vec<Rational>]) -> SquareMatrix {
    SquareMatrix::from_rationals(rows).unwrap()
}

proptest! {
    #[test]
    fn det_matches_cofactor_expansion(m in (1usize..=4).prop_flat_map(matrix)) {
        prop_assert_eq!(to_matrix(&m).det(), RatFn::constant(cofactor_det(&m)));
    }

    #[test]
    fn det_is_multiplicative(a in matrix(3), b in matrix(3)) {
        let (a, b) = (to_matrix(&a), to_matrix(&b));
        prop_assert_eq!(a.mul(&b).unwrap().det(), &a.det() * &b.det());
    }

    #[test]
    fn gcd_divides_both(a in poly(), b in poly(), c in poly()) {
        let (ac, bc) = (&a * &c, &b * &c);
        let g = gcd(&ac, &bc);
        if !ac.is_zero() {
            prop_assert!(ac.div_exact(&g).is_some());
        }
        if !bc.is_zero() {
            prop_assert!(bc.div_exact(&g).is_some());
        }
        if !c.is_zero() && !(ac.is_zero() && bc.is_zero()) {
            prop_assert!(g.div_exact(&c.monic()).is_some());
        }
    }

    #[test]
    fn normal_form_is_unique(a in poly(), b in poly(), c in poly()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let direct = RatFn::new(a.clone(), b.clone()).unwrap();
        let scaled = RatFn::new(&a * &c, &b * &c).unwrap();
        prop_assert_eq!(&direct, &scaled);
        let via_ops = &RatFn::from_poly(a) * &RatFn::from_poly(b).inv().unwrap();
        prop_assert_eq!(direct, via_ops);
    }

    #[test]
    fn similar_matrices_share_elementary_symmetric(diag in prop::collection::vec(rational(), 3), upper in prop::collection::vec(rational(), 3)) {
        // T upper triangular, P = [[1,1,0],[0,1,1],[0,0,1]] with P⁻¹ known exactly.
        let t = vec![
            vec![diag[0].clone(), upper[0].clone(), upper[1].clone()],
            vec![frac(0, 1), diag[1].clone(), upper[2].clone()],
            vec![frac(0, 1), frac(0, 1), diag[2].clone()],
        ];
        let p = to_matrix(&[vec![frac(1, 1), frac(1, 1), frac(0, 1)], vec![frac(0, 1), frac(1, 1), frac(1, 1)], vec![frac(0, 1), frac(0, 1), frac(1, 1)]]);
        let p_inv = to_matrix(&[vec![frac(1, 1), frac(-1, 1), frac(1, 1)], vec![frac(0, 1), frac(1, 1), frac(-1, 1)], vec![frac(0, 1), frac(0, 1), frac(1, 1)]]);
        prop_assert!(p.mul(&p_inv).unwrap() == SquareMatrix::identity(3));
        let t = to_matrix(&t);
        let similar = p.mul(&t).unwrap().mul(&p_inv).unwrap();
        prop_assert_eq!(similar.elementary_symmetric(), t.elementary_symmetric());
        let d: Vec<RatFn> = diag.into_iter().map(RatFn::constant).collect();
        prop_assert_eq!(t.elementary_symmetric(), loc_calc::algebra::matrix::elementary_symmetric_of(&d));
    }
}

/// Characteristic polynomial `det(xI − M)` through the determinant of a
/// polynomial matrix, compared with the division-free route.
#[test]
fn characteristic_polynomial_via_det() {
    let x = RatFn::var(Var::new("x"));
    let rows = [
        vec![frac(1, 2), frac(3, 1), frac(-1, 1), frac(0, 1)],
        vec![frac(2, 1), frac(0, 1), frac(5, 3), frac(1, 1)],
        vec![frac(-4, 1), frac(1, 1), frac(1, 1), frac(2, 1)],
        vec![frac(0, 1), frac(7, 2), frac(-2, 1), frac(3, 1)],
    ];
    let m = to_matrix(&rows);
    let xi_minus_m = SquareMatrix::from_fn(4, |i, j| {
        let e = RatFn::constant(rows[i][j].clone());
        if i == j { &x - &e } else { -e }
    });
    let charpoly = xi_minus_m.det();
    let coeffs = charpoly.numer().coefficients_in(&Var::new("x"));
    let e = m.elementary_symmetric();
    for k in 1..=4 {
        let expected = if k % 2 == 0 { coeffs[4 - k].clone() } else { -&coeffs[4 - k] };
        assert_eq!(e[k - 1], RatFn::from_poly(expected), "e_{k}");
    }
}

#[test]
fn symbolic_entries_det() {
    let a = RatFn::var(Var::new("a"));
    let b = RatFn::var(Var::new("b"));
    let m = SquareMatrix::from_rows(vec![
        vec![a.clone(), b.clone(), RatFn::one()],
        vec![RatFn::one(), a.clone(), b.clone()],
        vec![b.clone(), RatFn::one(), a.clone()],
    ])
    .unwrap();
    // circulant: a³ + b³ + 1 − 3ab
    let expected = &(&(&a.pow(3) + &b.pow(3)) + &RatFn::one()) - &(&a * &b).scale(&frac(3, 1));
    assert_eq!(m.det(), expected);
}
