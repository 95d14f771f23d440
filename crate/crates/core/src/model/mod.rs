//! Fixed-point data of a vector field on a compact complex manifold, with
//! optional bundle data, plus builders for the standard examples.

mod io;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::rational::{self, Rational};
use crate::algebra::{RatFn, SparsePoly, SquareMatrix, Var};
use crate::error::{Error, Result};

pub use io::{load_model, model_from_json, model_to_json, save_model};

/// Sign convention for the stored tangent linearization.
///
/// Builders store the Jacobian of the field in chart coordinates; at `p_j` on
/// ℙⁿ the weights are `λ_i − λ_j`. The bracket convention `u ↦ [V, u]` is its
/// negative. Jacobian is the calibrated default: together with the `𝒪(1)`
/// weight `c_j = λ_j` it gives `∫ c₁(𝒪(1))ⁿ = 1` and the Euler count `n + 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LinearizationConvention {
    #[default]
    Jacobian,
    Bracket,
}

impl LinearizationConvention {
    fn apply(self, m: SquareMatrix) -> SquareMatrix {
        match self {
            LinearizationConvention::Jacobian => m,
            LinearizationConvention::Bracket => m.neg(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub name: String,
    /// Linearization of the field at the zero.
    pub tangent: SquareMatrix,
    /// Induced endomorphism of the bundle fiber.
    pub bundle_endo: Option<SquareMatrix>,
    /// Scalar `c_j` with `L(z) = c_j z` when the bundle is a line bundle.
    pub line_weight: Option<RatFn>,
    /// Generator scale of the local trivialization of the twisting line bundle
    /// against which `tangent` is written (meromorphic fields only).
    pub twist_weight: Option<RatFn>,
}

impl FixedPoint {
    pub fn new(name: impl Into<String>, tangent: SquareMatrix) -> Self {
        FixedPoint {
            name: name.into(),
            tangent,
            bundle_endo: None,
            line_weight: None,
            twist_weight: None,
        }
    }

    pub fn with_line_weight(mut self, w: RatFn) -> Self {
        self.line_weight = Some(w);
        self
    }

    pub fn with_bundle_endo(mut self, m: SquareMatrix) -> Self {
        self.bundle_endo = Some(m);
        self
    }

    pub fn with_twist_weight(mut self, w: RatFn) -> Self {
        self.twist_weight = Some(w);
        self
    }

    pub fn tangent_det(&self) -> RatFn {
        self.tangent.det()
    }

    /// The bundle endomorphism, taking a line weight as a 1×1 matrix.
    pub fn bundle_matrix(&self) -> Option<SquareMatrix> {
        self.bundle_endo.clone().or_else(|| {
            self.line_weight
                .as_ref()
                .map(|w| SquareMatrix::diagonal(vec![w.clone()]))
        })
    }

    fn substitute_all(&self, values: &BTreeMap<Var, Rational>) -> Result<Self> {
        let sub = |r: &RatFn| r.eval_partial(values);
        let sub_m = |m: &SquareMatrix| -> Result<SquareMatrix> {
            let rows = m
                .rows()
                .iter()
                .map(|r| r.iter().map(sub).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            SquareMatrix::from_rows(rows)
        };
        Ok(FixedPoint {
            name: self.name.clone(),
            tangent: sub_m(&self.tangent)?,
            bundle_endo: self.bundle_endo.as_ref().map(sub_m).transpose()?,
            line_weight: self.line_weight.as_ref().map(sub).transpose()?,
            twist_weight: self.twist_weight.as_ref().map(sub).transpose()?,
        })
    }

    fn is_symbolic(&self) -> bool {
        let sym = |r: &RatFn| !r.is_constant();
        let sym_m = |m: &SquareMatrix| m.rows().iter().flatten().any(sym);
        sym_m(&self.tangent)
            || self.bundle_endo.as_ref().is_some_and(sym_m)
            || self.line_weight.as_ref().is_some_and(sym)
            || self.twist_weight.as_ref().is_some_and(sym)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyModel {
    dim: usize,
    rank: usize,
    symbolic: bool,
    points: Vec<FixedPoint>,
}

impl VarietyModel {
    /// Checks the structural invariants: shared dimensions and unique names.
    /// Nondegeneracy is reported by [`validate`], not enforced here.
    pub fn new(dim: usize, rank: usize, points: Vec<FixedPoint>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for p in &points {
            if !names.insert(p.name.as_str()) {
                return Err(Error::InvalidModel(format!("duplicate point name `{}`", p.name)));
            }
            if p.tangent.dim() != dim {
                return Err(Error::InvalidModel(format!(
                    "point `{}`: tangent is {t}×{t}, expected {dim}×{dim}",
                    p.name,
                    t = p.tangent.dim()
                )));
            }
            if let Some(b) = &p.bundle_endo {
                if b.dim() != rank {
                    return Err(Error::InvalidModel(format!(
                        "point `{}`: bundle endomorphism is {b}×{b}, expected rank {rank}",
                        p.name,
                        b = b.dim()
                    )));
                }
            }
            if p.line_weight.is_some() && rank != 1 {
                return Err(Error::InvalidModel(format!(
                    "point `{}`: line weight given but the bundle rank is {rank}",
                    p.name
                )));
            }
        }
        let symbolic = points.iter().any(FixedPoint::is_symbolic);
        Ok(VarietyModel {
            dim,
            rank,
            symbolic,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn symbolic(&self) -> bool {
        self.symbolic
    }

    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn point(&self, name: &str) -> Option<&FixedPoint> {
        self.points.iter().find(|p| p.name == name)
    }

    /// Substitutes rational values for weight variables everywhere.
    pub fn substitute(&self, values: &BTreeMap<Var, Rational>) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| p.substitute_all(values))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, self.rank, points)
    }

    /// The same zeroes carrying a line bundle with weight `f(p)` at each point.
    pub fn with_line_weights(&self, f: impl Fn(&FixedPoint) -> RatFn) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| FixedPoint {
                bundle_endo: None,
                line_weight: Some(f(p)),
                ..p.clone()
            })
            .collect();
        Self::new(self.dim, 1, points)
    }

    /// The same model with every tangent matrix negated.
    pub fn flip_tangent_sign(&self) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| FixedPoint {
                tangent: p.tangent.neg(),
                ..p.clone()
            })
            .collect();
        VarietyModel {
            points,
            ..self.clone()
        }
    }
}

/// `count` weight indeterminates `l{offset} … l{offset+count−1}`.
pub fn symbolic_weights(count: usize, offset: usize) -> Vec<RatFn> {
    (offset..offset + count)
        .map(|i| RatFn::var(Var::weight(i)))
        .collect()
}

pub fn rational_weights(values: &[Rational]) -> Vec<RatFn> {
    values.iter().cloned().map(RatFn::constant).collect()
}

/// ℙⁿ with the field `Σ λ_i z_i ∂/∂z_i` and `𝒪(1)` weights `c_j = λ_j`.
pub fn build_projective_space(n: usize, weights: &[RatFn]) -> Result<VarietyModel> {
    build_projective_space_with(n, weights, LinearizationConvention::default())
}

pub fn build_projective_space_with(
    n: usize,
    weights: &[RatFn],
    convention: LinearizationConvention,
) -> Result<VarietyModel> {
    if n == 0 {
        return Err(Error::InvalidArgument("projective dimension must be positive".into()));
    }
    if weights.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "ℙ^{n} needs {} weights, got {}",
            n + 1,
            weights.len()
        )));
    }
    for j in 0..=n {
        for i in 0..j {
            if weights[i] == weights[j] {
                return Err(Error::Degenerate {
                    point: format!("p{j}"),
                });
            }
        }
    }
    let points = (0..=n)
        .map(|j| {
            let diag = (0..=n)
                .filter(|&i| i != j)
                .map(|i| &weights[i] - &weights[j])
                .collect();
            let tangent = convention.apply(SquareMatrix::diagonal(diag));
            FixedPoint::new(format!("p{j}"), tangent).with_line_weight(weights[j].clone())
        })
        .collect();
    VarietyModel::new(n, 1, points)
}

/// A single point: the unit for [`build_product`].
pub fn build_point() -> VarietyModel {
    let p = FixedPoint::new("pt", SquareMatrix::identity(0)).with_line_weight(RatFn::zero());
    VarietyModel::new(0, 1, vec![p]).expect("well-formed")
}

/// Product of two models: fixed points are pairs and tangents are block-diagonal.
/// Line weights add when both factors carry them on every point; all other
/// bundle data is dropped.
pub fn build_product(a: &VarietyModel, b: &VarietyModel) -> Result<VarietyModel> {
    let has_lines = |m: &VarietyModel| m.points.iter().all(|p| p.line_weight.is_some());
    let keep_lines = has_lines(a) && has_lines(b);
    let mut points = Vec::with_capacity(a.points.len() * b.points.len());
    for pa in &a.points {
        for pb in &b.points {
            let mut p = FixedPoint::new(
                format!("{}|{}", pa.name, pb.name),
                SquareMatrix::block_diagonal(&pa.tangent, &pb.tangent),
            );
            if keep_lines {
                let (wa, wb) = (pa.line_weight.as_ref(), pb.line_weight.as_ref());
                p.line_weight = Some(wa.expect("checked") + wb.expect("checked"));
            }
            points.push(p);
        }
    }
    VarietyModel::new(a.dim + b.dim, if keep_lines { 1 } else { 0 }, points)
}

/// `∫_{ℙⁿ} c_n(Θ ⊗ 𝒪(d)) = Σ_k C(n+1, k) dⁿ⁻ᵏ`, the number of zeroes of a
/// section of `Θ ⊗ 𝒪(d)` counted with multiplicity.
pub fn twisted_zero_count(n: usize, d: u32) -> u64 {
    let mut total = 0u64;
    let mut binom = 1u64;
    for k in 0..=n {
        total += binom * (d as u64).pow((n - k) as u32);
        binom = binom * (n as u64 + 1 - k as u64) / (k as u64 + 1);
    }
    total
}

fn homogeneous_var(i: usize) -> Var {
    Var::new(format!("x{i}"))
}

/// ℙⁿ with a meromorphic field `V ∈ H⁰(Θ ⊗ 𝒪(d))` given by homogeneous
/// components `Q_0 … Q_n` of degree `d + 1` in `x0 … xn` (modulo the Euler
/// field), together with its complete list of zeroes.
///
/// At each zero the tangent is the Jacobian of `V` in the affine chart of the
/// first nonzero coordinate `x_k`, written against the trivialization `x_kᵈ`.
pub fn build_projective_twisted(
    n: usize,
    d: u32,
    components: &[SparsePoly],
    zeroes: &[Vec<Rational>],
) -> Result<VarietyModel> {
    if components.len() != n + 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} homogeneous components, got {}",
            n + 1,
            components.len()
        )));
    }
    let xs: Vec<Var> = (0..=n).map(homogeneous_var).collect();
    for (i, q) in components.iter().enumerate() {
        if let Some(v) = q.vars().iter().find(|v| !xs.contains(v)) {
            return Err(Error::InvalidArgument(format!("component {i} uses unknown variable {v}")));
        }
        if q.terms().any(|(m, _)| m.degree() != d + 1) {
            return Err(Error::InvalidArgument(format!(
                "component {i} is not homogeneous of degree {}",
                d + 1
            )));
        }
    }
    let expected = twisted_zero_count(n, d);
    if zeroes.len() as u64 != expected {
        return Err(Error::InvalidModel(format!(
            "a section of Θ⊗𝒪({d}) on ℙ^{n} has {expected} zeroes with multiplicity, got {}",
            zeroes.len()
        )));
    }

    let mut points = Vec::with_capacity(zeroes.len());
    for x in zeroes {
        if x.len() != n + 1 {
            return Err(Error::InvalidArgument(format!("zero {x:?} needs {} coordinates", n + 1)));
        }
        let Some(k) = x.iter().position(|c| !c.is_zero()) else {
            return Err(Error::InvalidArgument("the zero vector is not a point".into()));
        };
        let point: Vec<Rational> = x.iter().map(|c| c / &x[k]).collect();
        let name = format!(
            "[{}]",
            point.iter().map(rational::display).collect::<Vec<_>>().join(":")
        );

        // V vanishes at [x] iff Q(x) is proportional to x.
        let at: BTreeMap<Var, Rational> = xs.iter().cloned().zip(point.iter().cloned()).collect();
        let qx: Vec<Rational> = components
            .iter()
            .map(|q| q.eval_partial(&at).constant_value().expect("fully evaluated"))
            .collect();
        let parallel = (0..=n).all(|i| (0..=n).all(|j| &qx[i] * &point[j] == &qx[j] * &point[i]));
        if !parallel {
            return Err(Error::InvalidModel(format!("{name} is not a zero of the field")));
        }

        // Chart x_k = 1 with coordinates x_i (i ≠ k): F_i = Q_i − x_i Q_k.
        let chart: Vec<usize> = (0..=n).filter(|&i| i != k).collect();
        let restrict = |q: &SparsePoly| q.substitute(&xs[k], &SparsePoly::one());
        let qk = restrict(&components[k]);
        let fields: Vec<SparsePoly> = chart
            .iter()
            .map(|&i| &restrict(&components[i]) - &(&SparsePoly::var(xs[i].clone()) * &qk))
            .collect();
        let jac = SquareMatrix::from_fn(n, |a, b| {
            let deriv = fields[a].derivative(&xs[chart[b]]);
            RatFn::constant(deriv.eval_partial(&at).constant_value().expect("fully evaluated"))
        });
        points.push(FixedPoint::new(name, jac).with_twist_weight(RatFn::one()));
    }
    VarietyModel::new(n, 0, points)
}

/// ℙ¹ with the meromorphic field `Π_k (z − r_k) ∂/∂z`, a section of
/// `Θ ⊗ 𝒪(d)` with `d + 2` simple zeroes at the given distinct rationals.
pub fn build_p1_factored(roots: &[Rational], d: u32) -> Result<VarietyModel> {
    if roots.len() != d as usize + 2 {
        return Err(Error::InvalidArgument(format!(
            "a section of Θ⊗𝒪({d}) on ℙ¹ has {} zeroes, got {} roots",
            d + 2,
            roots.len()
        )));
    }
    let (x0, x1) = (homogeneous_var(0), homogeneous_var(1));
    let z = SparsePoly::var(x1.clone());
    let p = roots.iter().fold(SparsePoly::one(), |acc, r| {
        &acc * &(&z - &SparsePoly::constant(r.clone()))
    });
    // Q_1 − z Q_0 = p in the chart x0 = 1, with Q_0 = −x1^(d+1).
    let rest = &p - &z.pow(d + 2);
    let coeffs = rest.coefficients_in(&x1);
    let mut q1 = SparsePoly::zero();
    for (k, c) in coeffs.iter().enumerate() {
        let mono = &SparsePoly::var(x1.clone()).pow(k as u32)
            * &SparsePoly::var(x0.clone()).pow(d + 1 - k as u32);
        q1 = &q1 + &(c * &mono);
    }
    let q0 = -SparsePoly::var(x1).pow(d + 1);
    let zeroes: Vec<Vec<Rational>> = roots.iter().map(|r| vec![Rational::one(), r.clone()]).collect();
    build_projective_twisted(1, d, &[q0, q1], &zeroes)
}

/// ℙ² with the section `(0, Π_k (x1 − a_k x0), 4·Π_l (x2 − b_l x0))` of
/// `Θ ⊗ 𝒪(d)`, `a_k = k`, `b_l = −l` for `k, l = 0 … d`, `d ≤ 2`.
///
/// Its zeroes are `[1:a_k:b_l]`, `[0:1:0]`, `[0:0:1]` and the points of
/// `x0 = 0` with `x1ᵈ = 4 x2ᵈ`, all rational for `d ≤ 2`.
pub fn build_p2_split_section(d: u32) -> Result<VarietyModel> {
    if d > 2 {
        return Err(Error::InvalidArgument(format!(
            "the split ℙ² section has irrational zeroes for d = {d}"
        )));
    }
    let (x0, x1, x2) = (
        SparsePoly::var(homogeneous_var(0)),
        SparsePoly::var(homogeneous_var(1)),
        SparsePoly::var(homogeneous_var(2)),
    );
    let a: Vec<Rational> = (0..=d as i64).map(rational::int).collect();
    let b: Vec<Rational> = (0..=d as i64).map(|l| rational::int(-l)).collect();
    let product = |x: &SparsePoly, roots: &[Rational]| {
        roots.iter().fold(SparsePoly::one(), |acc, r| {
            &acc * &(x - &x0.scale(r))
        })
    };
    let q1 = product(&x1, &a);
    let q2 = product(&x2, &b).scale(&rational::int(4));
    let mut zeroes: Vec<Vec<Rational>> = Vec::new();
    for ak in &a {
        for bl in &b {
            zeroes.push(vec![Rational::one(), ak.clone(), bl.clone()]);
        }
    }
    zeroes.push(vec![Rational::zero(), Rational::one(), Rational::zero()]);
    zeroes.push(vec![Rational::zero(), Rational::zero(), Rational::one()]);
    match d {
        1 => zeroes.push(vec![Rational::zero(), rational::int(4), Rational::one()]),
        2 => {
            zeroes.push(vec![Rational::zero(), rational::int(2), Rational::one()]);
            zeroes.push(vec![Rational::zero(), rational::int(-2), Rational::one()]);
        }
        _ => {}
    }
    build_projective_twisted(2, d, &[SparsePoly::zero(), q1, q2], &zeroes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub point: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    /// No errors (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(|i| i.severity == Severity::Warning)
    }

    pub fn degenerate_points(&self) -> Vec<&str> {
        self.issues
            .iter()
            .filter(|i| i.severity == Severity::Error && i.message.contains("degenerate"))
            .filter_map(|i| i.point.as_deref())
            .collect()
    }
}

/// Checks nondegeneracy of every zero. Never modifies the model.
pub fn validate(m: &VarietyModel) -> ValidationReport {
    let mut issues = Vec::new();
    if m.points.is_empty() {
        issues.push(ValidationIssue {
            severity: Severity::Warning,
            point: None,
            message: "no zeroes: every localization sum is 0".into(),
        });
    }
    for p in &m.points {
        if p.tangent.det().is_zero() {
            issues.push(ValidationIssue {
                severity: Severity::Error,
                point: Some(p.name.clone()),
                message: "degenerate zero: tangent determinant vanishes".into(),
            });
        }
    }
    ValidationReport { issues }
}

/// Convenience for tests and the CLI: weights given as rationals.
pub fn projective_space_numeric(weights: &[i64]) -> Result<VarietyModel> {
    let ws: Vec<Rational> = weights.iter().map(|&w| rational::int(w)).collect();
    build_projective_space(weights.len() - 1, &rational_weights(&ws))
}
