//! C ABI for `loc-calc`.
//!
//! Models are opaque handles owned by the caller and released with
//! [`lc_model_free`]. Every fallible call returns an [`LcStatus`]; on failure
//! [`lc_last_error`] describes the most recent error on the calling thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`lc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use loc_calc::chern::ChernPoly;
use loc_calc::localize::{baum_bott_sum, bott_sum, carrell_liebermann_sum, zero_sum_identity, LocalizationResult};
use loc_calc::model::{build_projective_space, load_model, projective_space_numeric, save_model, symbolic_weights, VarietyModel};
use loc_calc::residue::{residue_contour_numeric, ComplexPoly, ResidueProblem};
use loc_calc::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// An expression failed to parse.
    Parse = 3,
    /// An argument or model file is malformed.
    InvalidArgument = 4,
    /// A zero is degenerate or a denominator vanishes.
    Degenerate = 5,
    /// The model lacks bundle or twist data the call needs.
    MissingData = 6,
    /// Quadrature produced a non-finite value.
    Numeric = 7,
    /// Reading or writing a file failed.
    Io = 8,
    /// The library panicked; this is a bug.
    Panic = 9,
}

/// Opaque model handle.
pub struct LcModel(VarietyModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LcStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownSymbol { .. } | Error::NotPolynomial(_) => LcStatus::Parse,
        Error::Inhomogeneous { .. } | Error::InvalidModel(_) | Error::Schema(_) | Error::InvalidArgument(_) => {
            LcStatus::InvalidArgument
        }
        Error::DivisionByZero
        | Error::Degenerate { .. }
        | Error::DegenerateResidue
        | Error::NearZeroDenominator { .. } => LcStatus::Degenerate,
        Error::MissingBundleData { .. }
        | Error::MissingTwist { .. }
        | Error::MissingNumerator { .. }
        | Error::MixedNormalization => LcStatus::MissingData,
        Error::NonFinite => LcStatus::Numeric,
        Error::Io(_) => LcStatus::Io,
    }
}

/// Failure inside a call body: a status plus message.
struct Fail(LcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LcStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(LcStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(LcStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn model_arg<'a>(m: *const LcModel) -> Result<&'a VarietyModel, Fail> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

unsafe fn write_result(
    r: LocalizationResult,
    out_value: *mut *mut c_char,
    out_tau: *mut c_int,
    out_t: *mut c_int,
) {
    *out_value = owned_string(r.value.to_string());
    if !out_tau.is_null() {
        *out_tau = r.tau_exponent;
    }
    if !out_t.is_null() {
        *out_t = r.t_exponent;
    }
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// ℙⁿ with the standard torus field. `weights` points at `n + 1` integers,
/// or is null for symbolic weights `l0 … ln`.
///
/// # Safety
/// `weights` must be null or valid for `n + 1` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_model_projective_space(
    n: usize,
    weights: *const i64,
    out: *mut *mut LcModel,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(Fail(LcStatus::InvalidArgument, "dimension must be positive".into()));
        }
        let m = if weights.is_null() {
            build_projective_space(n, &symbolic_weights(n + 1, 0))?
        } else {
            projective_space_numeric(std::slice::from_raw_parts(weights, n + 1))?
        };
        *out = Box::into_raw(Box::new(LcModel(m)));
        Ok(())
    })
}

/// Reads a JSON model file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_model_load(path: *const c_char, out: *mut *mut LcModel) -> LcStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = Box::into_raw(Box::new(LcModel(load_model(Path::new(path))?)));
        Ok(())
    })
}

/// Writes a model as JSON.
///
/// # Safety
/// `model` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn lc_model_save(model: *const LcModel, path: *const c_char) -> LcStatus {
    guard(|| {
        let m = model_arg(model)?;
        save_model(m, Path::new(str_arg(path, "path")?))?;
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn lc_model_free(model: *mut LcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of zeroes of the model's field.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_model_num_points(model: *const LcModel, out: *mut usize) -> LcStatus {
    guard(|| {
        let m = model_arg(model)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.points().len();
        Ok(())
    })
}

/// Complex dimension of the model.
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_model_dim(model: *const LcModel, out: *mut usize) -> LcStatus {
    guard(|| {
        let m = model_arg(model)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = m.dim();
        Ok(())
    })
}

type SumFn = fn(&VarietyModel, &ChernPoly) -> loc_calc::Result<LocalizationResult>;

unsafe fn run_sum(
    f: SumFn,
    model: *const LcModel,
    expr: *const c_char,
    out_value: *mut *mut c_char,
    out_tau: *mut c_int,
    out_t: *mut c_int,
) -> LcStatus {
    guard(|| {
        let m = model_arg(model)?;
        let text = str_arg(expr, "expr")?;
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let phi = ChernPoly::parse(text, m.dim())?;
        write_result(f(m, &phi)?, out_value, out_tau, out_t);
        Ok(())
    })
}

/// Bott sum of a Chern polynomial in `c1 … cn`. The value is written as an
/// owned string; `out_tau` and `out_t` (nullable) receive the exponents of
/// `2πi` and `t` that multiply it.
///
/// # Safety
/// `model` must be a live handle, `phi` a nul-terminated string and
/// `out_value` writable; `out_tau`/`out_t` may be null.
#[no_mangle]
pub unsafe extern "C" fn lc_bott_sum(
    model: *const LcModel,
    phi: *const c_char,
    out_value: *mut *mut c_char,
    out_tau: *mut c_int,
    out_t: *mut c_int,
) -> LcStatus {
    run_sum(bott_sum, model, phi, out_value, out_tau, out_t)
}

/// Carrell–Liebermann sum of a polynomial in the bundle classes.
///
/// # Safety
/// As for [`lc_bott_sum`].
#[no_mangle]
pub unsafe extern "C" fn lc_carrell_liebermann_sum(
    model: *const LcModel,
    p: *const c_char,
    out_value: *mut *mut c_char,
    out_tau: *mut c_int,
    out_t: *mut c_int,
) -> LcStatus {
    run_sum(carrell_liebermann_sum, model, p, out_value, out_tau, out_t)
}

/// Baum–Bott sum of a polynomial in `g1 … gn`; every point needs a twist weight.
///
/// # Safety
/// As for [`lc_bott_sum`].
#[no_mangle]
pub unsafe extern "C" fn lc_baum_bott_sum(
    model: *const LcModel,
    phi: *const c_char,
    out_value: *mut *mut c_char,
    out_tau: *mut c_int,
    out_t: *mut c_int,
) -> LcStatus {
    run_sum(baum_bott_sum, model, phi, out_value, out_tau, out_t)
}

/// Writes 1 to `out_is_zero` when `Σ 1/det J` vanishes identically, else 0.
///
/// # Safety
/// `model` must be a live handle; `out_is_zero` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lc_zero_sum_identity(model: *const LcModel, out_is_zero: *mut c_int) -> LcStatus {
    guard(|| {
        let m = model_arg(model)?;
        if out_is_zero.is_null() {
            return Err(null("out_is_zero"));
        }
        *out_is_zero = c_int::from(zero_sum_identity(m)?.is_zero());
        Ok(())
    })
}

/// Numeric residue at the origin of `s / (a₁⋯a_n)`, with components and
/// numerator given as expressions in `z1 … zn` (and `i`).
///
/// # Safety
/// `components` must point at `n` nul-terminated strings, `numerator` must
/// be nul-terminated, and `out_re`/`out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn lc_residue_contour(
    n: usize,
    components: *const *const c_char,
    numerator: *const c_char,
    radius: f64,
    samples: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LcStatus {
    guard(|| {
        if components.is_null() {
            return Err(null("components"));
        }
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out_re/out_im"));
        }
        let comps = std::slice::from_raw_parts(components, n)
            .iter()
            .map(|&c| Ok(ComplexPoly::parse(str_arg(c, "component")?, n)?))
            .collect::<Result<Vec<_>, Fail>>()?;
        let s = ComplexPoly::parse(str_arg(numerator, "numerator")?, n)?;
        let v = residue_contour_numeric(&ResidueProblem::new(comps, s)?, radius, samples)?;
        *out_re = v.re;
        *out_im = v.im;
        Ok(())
    })
}
