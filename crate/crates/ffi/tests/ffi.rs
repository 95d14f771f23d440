use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

use loc_calc_ffi::*;

fn last_error() -> String {
    let p = lc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn pn(n: usize, weights: Option<&[i64]>) -> *mut LcModel {
    let mut m = ptr::null_mut();
    let w = weights.map_or(ptr::null(), |w| w.as_ptr());
    assert_eq!(unsafe { lc_model_projective_space(n, w, &mut m) }, LcStatus::Ok);
    m
}

type Sum = unsafe extern "C" fn(*const LcModel, *const c_char, *mut *mut c_char, *mut c_int, *mut c_int) -> LcStatus;

fn sum(f: Sum, m: *const LcModel, expr: &str) -> Result<(String, c_int, c_int), (LcStatus, String)> {
    let e = CString::new(expr).unwrap();
    let (mut v, mut tau, mut t) = (ptr::null_mut(), 7, 7);
    let status = unsafe { f(m, e.as_ptr(), &mut v, &mut tau, &mut t) };
    if status != LcStatus::Ok {
        return Err((status, last_error()));
    }
    let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap().to_owned();
    unsafe { lc_string_free(v) };
    Ok((s, tau, t))
}

#[test]
fn sums_through_the_c_abi() {
    let m = pn(2, None);
    assert_eq!(sum(lc_bott_sum, m, "c1^2").unwrap(), ("9".into(), 0, 0));
    assert_eq!(sum(lc_carrell_liebermann_sum, m, "c1^2").unwrap().0, "1");
    assert!(lc_last_error().is_null());
    let mut zero = -1;
    assert_eq!(unsafe { lc_zero_sum_identity(m, &mut zero) }, LcStatus::Ok);
    assert_eq!(zero, 1);
    let (mut pts, mut dim) = (0, 0);
    unsafe {
        assert_eq!(lc_model_num_points(m, &mut pts), LcStatus::Ok);
        assert_eq!(lc_model_dim(m, &mut dim), LcStatus::Ok);
        lc_model_free(m);
    }
    assert_eq!((pts, dim), (3, 2));

    let m = pn(3, Some(&[0, 1, 5, -2]));
    assert_eq!(sum(lc_bott_sum, m, "c1*c2").unwrap().0, "24");
    unsafe { lc_model_free(m) };
}

#[test]
fn errors_map_to_codes() {
    let m = pn(2, None);
    let (status, msg) = sum(lc_bott_sum, m, "c1 ** 2").unwrap_err();
    assert_eq!(status, LcStatus::Parse);
    assert!(msg.contains("column"), "{msg}");
    assert_eq!(sum(lc_bott_sum, m, "c1").unwrap_err().0, LcStatus::InvalidArgument);
    assert_eq!(sum(lc_baum_bott_sum, m, "g1^2").unwrap_err().0, LcStatus::MissingData);
    assert_eq!(sum(lc_bott_sum, ptr::null(), "c1^2").unwrap_err().0, LcStatus::NullPointer);
    let bad = [0xffu8, 0];
    let mut v = ptr::null_mut();
    let status = unsafe { lc_bott_sum(m, bad.as_ptr().cast(), &mut v, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(status, LcStatus::InvalidUtf8);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { lc_model_projective_space(2, [1i64, 1, 2].as_ptr(), &mut out) }, LcStatus::Degenerate);
    assert_eq!(unsafe { lc_model_projective_space(0, ptr::null(), &mut out) }, LcStatus::InvalidArgument);
    unsafe { lc_model_free(m) };
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("p1.json").to_str().unwrap()).unwrap();
    let m = pn(1, None);
    assert_eq!(unsafe { lc_model_save(m, path.as_ptr()) }, LcStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { lc_model_load(path.as_ptr(), &mut back) }, LcStatus::Ok);
    assert_eq!(sum(lc_bott_sum, back, "c1").unwrap().0, "2");
    let missing = CString::new("/nonexistent/x.json").unwrap();
    assert_eq!(unsafe { lc_model_load(missing.as_ptr(), &mut back) }, LcStatus::Io);
    unsafe {
        lc_model_free(m);
        lc_model_free(back);
        lc_model_free(ptr::null_mut());
        lc_string_free(ptr::null_mut());
    }
}

#[test]
fn residue_contour() {
    let comps = [CString::new("z1^2").unwrap(), CString::new("z2 + z1*z2").unwrap()];
    let ptrs: Vec<*const c_char> = comps.iter().map(|c| c.as_ptr()).collect();
    let s = CString::new("z1 + 3*i").unwrap();
    let (mut re, mut im) = (0.0, 0.0);
    let status = unsafe { lc_residue_contour(2, ptrs.as_ptr(), s.as_ptr(), 0.5, 128, &mut re, &mut im) };
    assert_eq!(status, LcStatus::Ok);
    // (z1 + 3i)(1 − z1 + …) has z1-coefficient 1 − 3i.
    assert!((re - 1.0).abs() < 1e-9 && (im + 3.0).abs() < 1e-9, "{re} {im}");
    let degenerate = [CString::new("z1 - z2").unwrap(), CString::new("z2").unwrap()];
    let ptrs: Vec<*const c_char> = degenerate.iter().map(|c| c.as_ptr()).collect();
    let status = unsafe { lc_residue_contour(2, ptrs.as_ptr(), s.as_ptr(), 0.5, 64, &mut re, &mut im) };
    assert_eq!(status, LcStatus::Degenerate);
}

/// The generated header compiles as C and C++ and declares every export.
#[test]
fn header_is_usable_from_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/loc_calc.h")).unwrap();
    for name in [
        "lc_model_projective_space", "lc_model_load", "lc_model_save", "lc_model_free",
        "lc_model_num_points", "lc_model_dim", "lc_bott_sum", "lc_carrell_liebermann_sum",
        "lc_baum_bott_sum", "lc_zero_sum_identity", "lc_residue_contour", "lc_string_free",
        "lc_last_error", "LC_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = std::process::Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, "-I"])
            .arg(dir.join("include"))
            .arg(dir.join("tests/smoke.c"))
            .output()
        else {
            eprintln!("{compiler} not available, skipping");
            continue;
        };
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Links the C smoke program against the static library and runs it.
#[test]
fn c_program_links_and_runs() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile.join("libloc_calc_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let bin = tempfile::tempdir().unwrap();
    let out_bin = bin.path().join("smoke");
    let Ok(build) = std::process::Command::new("cc")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out_bin)
        .output()
    else {
        eprintln!("cc not available, skipping");
        return;
    };
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = std::process::Command::new(&out_bin).output().unwrap();
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "9");
}
