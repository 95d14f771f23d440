//! Command-line driver. `run` returns the process exit code: 0 on success,
//! 1 on a computation error or failed check, 2 on a usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::algebra::rational::{parse_rational, Rational};
use crate::chern::ChernPoly;
use crate::error::{Error, Result};
use crate::expr::{parse_ratfn, SymbolContext};
use crate::localize::{baum_bott_sum, bott_sum, carrell_liebermann_sum, LocalizationResult};
use crate::model::{
    build_p1_factored, build_product, build_projective_space, load_model, model_to_json,
    save_model, symbolic_weights, validate, LinearizationConvention, Severity, VarietyModel,
};
use crate::residue::{default_samples, residue_contour_numeric, ResidueProblem, DEFAULT_RADIUS};
use crate::verify::{dh_check, run_suite, Status, SuiteConfig, DH_TOL};

#[derive(Parser, Debug)]
#[command(name = "loc-calc", version, about = "Exact localization sums and residue checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Built-in ℙⁿ with the standard torus field.
    #[arg(long, value_name = "N", conflicts_with_all = ["product", "model"])]
    pn: Option<usize>,
    /// Comma-separated weights for --pn (symbolic when omitted).
    #[arg(long, requires = "pn")]
    weights: Option<String>,
    /// Product of projective spaces, e.g. "1,2" for ℙ¹×ℙ².
    #[arg(long, conflicts_with = "model")]
    product: Option<String>,
    /// Model file (JSON).
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also list the summand at every zero.
    #[arg(long)]
    per_point: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    Jacobian,
    Bracket,
}

impl From<Convention> for LinearizationConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Jacobian => LinearizationConvention::Jacobian,
            Convention::Bracket => LinearizationConvention::Bracket,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bott sum of a Chern polynomial in c1..cn.
    Bott {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Carrell–Liebermann sum of a polynomial in the bundle classes.
    Cl {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: String,
        /// Use 𝒪(d): line weights multiplied by d.
        #[arg(long, allow_negative_numbers = true)]
        degree: Option<i64>,
        /// Expression added to every line weight.
        #[arg(long)]
        shift: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Baum–Bott sum for a meromorphic field.
    Baumbott {
        /// Distinct rational zeroes of Π(z − r) ∂/∂z on ℙ¹.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "model", requires = "degree")]
        roots: Option<String>,
        /// Twist degree d of 𝒪(d).
        #[arg(long)]
        degree: Option<u32>,
        /// Model file whose points carry twist weights.
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numeric Grothendieck residue by contour quadrature.
    Residue {
        #[arg(long)]
        dim: usize,
        /// Component a_k in z1..zn (repeat once per component).
        #[arg(long = "a", required = true, allow_hyphen_values = true)]
        components: Vec<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: f64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Complex Duistermaat–Heckman check on ℙ¹.
    Dh {
        /// Multiply the Fubini–Study form by this factor.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Constant added to f.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        shift: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in scenario suite.
    Verify {
        #[arg(long, value_enum, default_value = "jacobian")]
        convention: Convention,
        /// Extra model files to check.
        #[arg(long = "model", value_name = "PATH")]
        models: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Model utilities.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
}

#[derive(Subcommand, Debug)]
enum ModelAction {
    /// Check every zero for nondegeneracy.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        json: bool,
    },
    /// Write a model as JSON.
    Convert {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',').map(|s| item(s.trim())).collect()
}

impl ModelArgs {
    fn build(&self) -> Result<VarietyModel> {
        if let Some(path) = &self.model {
            return load_model(path);
        }
        if let Some(dims_text) = &self.product {
            let dims = parse_list(dims_text, |s| {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad dimension `{s}` in --product")))
            })?;
            if dims.len() < 2 {
                return Err(Error::InvalidArgument("--product needs at least two dimensions".into()));
            }
            let mut offset = 0;
            let mut acc: Option<VarietyModel> = None;
            for n in dims {
                let factor = build_projective_space(n, &symbolic_weights(n + 1, offset))?;
                offset += n + 1;
                acc = Some(match acc {
                    None => factor,
                    Some(a) => build_product(&a, &factor)?,
                });
            }
            return Ok(acc.expect("at least two factors"));
        }
        let Some(n) = self.pn else {
            return Err(Error::InvalidArgument("one of --pn, --product or --model is required".into()));
        };
        let weights = match &self.weights {
            None => symbolic_weights(n + 1, 0),
            Some(w) => parse_list(w, |s| parse_ratfn(s, &SymbolContext::any()))?,
        };
        build_projective_space(n, &weights)
    }
}

fn value_text(r: &LocalizationResult) -> String {
    let mut s = r.value.to_string();
    if r.tau_exponent != 0 {
        s = format!("({s})*(2*pi*i)^{}", r.tau_exponent);
    }
    if r.t_exponent != 0 {
        s = format!("({s})*t^{}", r.t_exponent);
    }
    s
}

fn emit_result(r: &LocalizationResult, opts: &OutputArgs, out: &mut dyn Write) -> std::io::Result<()> {
    if opts.json {
        let mut obj = json!({
            "value": r.value.to_string(),
            "tau_exponent": r.tau_exponent,
            "t_exponent": r.t_exponent,
        });
        if opts.per_point {
            obj["per_point"] = r
                .per_point
                .iter()
                .map(|(n, s)| json!({"name": n, "summand": s.to_string()}))
                .collect();
        }
        writeln!(out, "{obj}")
    } else {
        if opts.per_point {
            let width = r.per_point.iter().map(|(n, _)| n.chars().count()).max().unwrap_or(0);
            for (n, s) in &r.per_point {
                writeln!(out, "{n:<width$}  {s}")?;
            }
        }
        writeln!(out, "{}", value_text(r))
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im.abs() <= 1e-12 * z.re.abs().max(1.0) {
        format!("{:.9}", z.re)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{:.9} {sign} {:.9}i", z.re, z.im.abs())
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Bott { model, phi, out: opts } => {
            let m = model.build()?;
            let phi = ChernPoly::parse(&phi, m.dim())?;
            emit_result(&bott_sum(&m, &phi)?, &opts, out)?;
        }
        Command::Cl { model, p, degree, shift, out: opts } => {
            let mut m = model.build()?;
            let shift = shift.map(|s| parse_ratfn(&s, &SymbolContext::any())).transpose()?;
            if degree.is_some() || shift.is_some() {
                if let Some(pt) = m.points().iter().find(|pt| pt.line_weight.is_none()) {
                    return Err(Error::MissingBundleData { point: pt.name.clone() });
                }
                let d = Rational::from_integer(degree.unwrap_or(1).into());
                m = m.with_line_weights(|pt| {
                    let w = pt.line_weight.as_ref().expect("checked above").scale(&d);
                    shift.as_ref().map_or(w.clone(), |s| &w + s)
                })?;
            }
            let p = ChernPoly::parse(&p, m.dim())?;
            emit_result(&carrell_liebermann_sum(&m, &p)?, &opts, out)?;
        }
        Command::Baumbott { roots, degree, model, phi, out: opts } => {
            let m = match (roots, model) {
                (Some(r), _) => {
                    let roots = parse_list(&r, parse_rational)?;
                    build_p1_factored(&roots, degree.expect("clap requires --degree"))?
                }
                (None, Some(path)) => load_model(path)?,
                (None, None) => {
                    return Err(Error::InvalidArgument("one of --roots or --model is required".into()))
                }
            };
            let phi = ChernPoly::parse(&phi, m.dim())?;
            emit_result(&baum_bott_sum(&m, &phi)?, &opts, out)?;
        }
        Command::Residue { dim, components, s, radius, samples, json } => {
            if components.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "--dim {dim} needs {dim} --a components, got {}",
                    components.len()
                )));
            }
            let comps: Vec<&str> = components.iter().map(String::as_str).collect();
            let problem = ResidueProblem::parse(&comps, &s)?;
            let samples = samples.unwrap_or_else(default_samples);
            let r = residue_contour_numeric(&problem, radius, samples)?;
            if json {
                writeln!(out, "{}", json!({"re": r.re, "im": r.im, "radius": radius, "samples": samples}))?;
            } else {
                writeln!(out, "{}", format_complex(r))?;
            }
        }
        Command::Dh { scale, shift, json } => {
            let o = dh_check(scale, Complex64::new(shift, 0.0))?;
            let err = o.abs_error();
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "lhs": o.lhs,
                        "rhs_re": o.rhs.re,
                        "rhs_im": o.rhs.im,
                        "abs_error": err,
                        "sign": o.sign,
                        "c_re": o.c.re,
                        "c_im": o.c.im,
                        "dbar_residual": o.dbar_residual,
                        "shift_coefficient": o.shift_coefficient.to_string(),
                    })
                )?;
            } else {
                writeln!(out, "lhs  ∫ω               {:.12}", o.lhs)?;
                writeln!(out, "rhs  (−2πi) Σ f/J     {}", format_complex(o.rhs))?;
                writeln!(out, "|lhs| − |rhs|         {err:.3e}")?;
                writeln!(out, "calibrated sign       {:+}", o.sign)?;
                writeln!(out, "f = c/(1+|z|²), c     {}", format_complex(o.c))?;
                writeln!(out, "∂̄ residual            {:.3e}", o.dbar_residual)?;
                writeln!(out, "Σ 1/J                 {}", o.shift_coefficient)?;
            }
            return Ok(if err <= DH_TOL { 0 } else { 1 });
        }
        Command::Verify { convention, models, json } => {
            let extra_models = models
                .iter()
                .map(|p| Ok((p.display().to_string(), load_model(p)?)))
                .collect::<Result<Vec<_>>>()?;
            let config = SuiteConfig {
                convention: convention.into(),
                extra_models,
                samples: None,
            };
            let reports = run_suite(&config);
            if json {
                for r in &reports {
                    writeln!(out, "{}", r.to_json())?;
                }
            } else {
                let width = reports.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
                for r in &reports {
                    let status = match r.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Warn => "WARN",
                    };
                    writeln!(out, "{status}  {:<width$}  lhs={}  rhs={}  {}", r.name, r.lhs, r.rhs, r.note)?;
                }
                let failed = reports.iter().filter(|r| !r.passed()).count();
                writeln!(out, "{} scenarios, {failed} failed", reports.len())?;
            }
            return Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 });
        }
        Command::Model { action } => match action {
            ModelAction::Validate { model, json } => {
                let m = model.build()?;
                let report = validate(&m);
                if json {
                    let issues: Vec<_> = report
                        .issues
                        .iter()
                        .map(|i| {
                            json!({
                                "severity": match i.severity { Severity::Error => "error", Severity::Warning => "warning" },
                                "point": i.point,
                                "message": i.message,
                            })
                        })
                        .collect();
                    writeln!(out, "{}", json!({"valid": report.is_valid(), "points": m.points().len(), "issues": issues}))?;
                } else {
                    for i in &report.issues {
                        let sev = match i.severity {
                            Severity::Error => "error",
                            Severity::Warning => "warning",
                        };
                        writeln!(out, "{sev}: {}{}", i.point.as_ref().map(|p| format!("{p}: ")).unwrap_or_default(), i.message)?;
                    }
                    writeln!(
                        out,
                        "{}: {} points, dim {}, rank {}",
                        if report.is_valid() { "valid" } else { "invalid" },
                        m.points().len(),
                        m.dim(),
                        m.rank()
                    )?;
                }
                return Ok(if report.is_valid() { 0 } else { 1 });
            }
            ModelAction::Convert { model, out: path } => {
                let m = model.build()?;
                match path {
                    Some(p) => save_model(&m, p)?,
                    None => writeln!(out, "{}", model_to_json(&m))?,
                }
            }
        },
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}
