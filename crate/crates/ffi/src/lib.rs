//! C interface to `chamberwalk`.
//!
//! Every fallible call returns a `CwStatus`; on failure the message is
//! available from `cw_last_error_message` on the same thread. Vectors are
//! passed as `(pointer, length)` pairs whose length must equal
//! `cw_root_system_dim`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use chamberwalk::random_walk::{run_group_walk, WalkConfig};
use chamberwalk::{build_root_system, chamber_project, m1_closed, semicharacter, spherical_phi, spherical_psi, ChamberPoint, Error, RootFamily, RootSystem};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Numerical = 4,
    Serialization = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwSphericalValue {
    pub re: f64,
    pub im: f64,
    pub est_abs_error: f64,
    pub regularized: bool,
}

/// Opaque root system handle.
pub struct CwRootSystem(RootSystem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CwStatus {
    match e {
        Error::DimensionMismatch { .. } => CwStatus::DimensionMismatch,
        Error::Json(_) => CwStatus::Serialization,
        Error::NoConvergence { .. }
        | Error::IllConditioned { .. }
        | Error::Underflow { .. }
        | Error::Overflow { .. }
        | Error::EnvelopeExceeded { .. } => CwStatus::Numerical,
        _ => CwStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            CwStatus::NullPointer
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            CwStatus::Panic
        }
    }
}

unsafe fn handle<'a>(rs: *const CwRootSystem) -> Result<&'a RootSystem, Failure> {
    rs.as_ref().map(|h| &h.0).ok_or(Failure::Null("root system"))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_len(rs: &RootSystem, len: usize) -> Result<(), Failure> {
    rs.check_dim(len).map_err(Failure::Core)
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Build a root system; `family` is one of 'A', 'B', 'C', 'D'.
///
/// # Safety
/// `out` must be a valid pointer; free the handle with `cw_root_system_free`.
#[no_mangle]
pub unsafe extern "C" fn cw_root_system_new(family: c_char, rank: usize, out: *mut *mut CwRootSystem) -> CwStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let fam: RootFamily = (family as u8 as char).to_string().parse()?;
        let rs = build_root_system(fam, rank)?;
        *out = Box::into_raw(Box::new(CwRootSystem(rs)));
        Ok(())
    })
}

/// # Safety
/// `rs` must come from `cw_root_system_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cw_root_system_free(rs: *mut CwRootSystem) {
    if !rs.is_null() {
        drop(Box::from_raw(rs));
    }
}

/// Ambient dimension, or 0 for a NULL handle.
///
/// # Safety
/// `rs` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_root_system_dim(rs: *const CwRootSystem) -> usize {
    rs.as_ref().map_or(0, |h| h.0.ambient_dim())
}

/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_root_system_rho(rs: *const CwRootSystem, out: *mut f64, len: usize) -> CwStatus {
    guard(|| {
        let rs = handle(rs)?;
        check_len(rs, len)?;
        output(out, len, "out")?.copy_from_slice(rs.rho());
        Ok(())
    })
}

/// # Safety
/// `x` must hold `len` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cw_semicharacter(rs: *const CwRootSystem, x: *const f64, len: usize, out: *mut f64) -> CwStatus {
    guard(|| {
        let rs = handle(rs)?;
        let x = input(x, len, "x")?;
        check_len(rs, len)?;
        let v = semicharacter(rs, x)?;
        out.as_mut().map(|o| *o = v).ok_or(Failure::Null("out"))
    })
}

unsafe fn spherical(
    rs: *const CwRootSystem,
    lambda_re: *const f64,
    lambda_im: *const f64,
    x: *const f64,
    len: usize,
    out: *mut CwSphericalValue,
    phi: bool,
) -> CwStatus {
    guard(|| {
        let rs = handle(rs)?;
        check_len(rs, len)?;
        let re = input(lambda_re, len, "lambda_re")?;
        let im: Option<&[f64]> = if lambda_im.is_null() { None } else { Some(std::slice::from_raw_parts(lambda_im, len)) };
        let x = input(x, len, "x")?;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        let lambda: Vec<Complex64> = (0..len).map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i]))).collect();
        let v = if phi { spherical_phi(rs, &lambda, x)? } else { spherical_psi(rs, &lambda, x)? };
        *out = CwSphericalValue { re: v.value.re, im: v.value.im, est_abs_error: v.est_abs_error, regularized: v.regularized };
        Ok(())
    })
}

/// Euclidean spherical function. `lambda_im` may be NULL for real `lambda`.
///
/// # Safety
/// All non-NULL vectors must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_spherical_psi(
    rs: *const CwRootSystem,
    lambda_re: *const f64,
    lambda_im: *const f64,
    x: *const f64,
    len: usize,
    out: *mut CwSphericalValue,
) -> CwStatus {
    spherical(rs, lambda_re, lambda_im, x, len, out, false)
}

/// Group spherical function. `lambda_im` may be NULL for real `lambda`.
///
/// # Safety
/// All non-NULL vectors must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_spherical_phi(
    rs: *const CwRootSystem,
    lambda_re: *const f64,
    lambda_im: *const f64,
    x: *const f64,
    len: usize,
    out: *mut CwSphericalValue,
) -> CwStatus {
    spherical(rs, lambda_re, lambda_im, x, len, out, true)
}

/// Modified moment function at a chamber point.
///
/// # Safety
/// `x` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_m1(rs: *const CwRootSystem, x: *const f64, len: usize, out: *mut f64) -> CwStatus {
    guard(|| {
        let rs = handle(rs)?;
        check_len(rs, len)?;
        let p = ChamberPoint::new(rs, input(x, len, "x")?.to_vec(), 1e-12)?;
        output(out, len, "out")?.copy_from_slice(m1_closed(rs, &p)?.coords());
        Ok(())
    })
}

/// The dominant representative of the Weyl orbit of `v`.
///
/// # Safety
/// `v` and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cw_chamber_project(rs: *const CwRootSystem, v: *const f64, len: usize, out: *mut f64) -> CwStatus {
    guard(|| {
        let rs = handle(rs)?;
        check_len(rs, len)?;
        let p = chamber_project(rs, input(v, len, "v")?)?;
        output(out, len, "out")?.copy_from_slice(p.coords());
        Ok(())
    })
}

/// Run a group walk from a JSON configuration and return the JSON report.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; release `*out_json` with
/// `cw_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cw_walk_json(config_json: *const c_char, out_json: *mut *mut c_char) -> CwStatus {
    guard(|| {
        if config_json.is_null() {
            return Err(Failure::Null("config_json"));
        }
        if out_json.is_null() {
            return Err(Failure::Null("out_json"));
        }
        let text = CStr::from_ptr(config_json).to_str().map_err(|e| Error::Parse(e.to_string()))?;
        let cfg: WalkConfig = serde_json::from_str(text).map_err(Error::from)?;
        let report = run_group_walk(&cfg)?;
        let s = serde_json::to_string(&report).map_err(Error::from)?;
        *out_json = CString::new(s).map_err(|e| Error::Parse(e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_family_sets_message() {
        let mut h = ptr::null_mut();
        let st = unsafe { cw_root_system_new(b'Q' as c_char, 2, &mut h) };
        assert_eq!(st, CwStatus::InvalidArgument);
        let msg = unsafe { CStr::from_ptr(cw_last_error_message()) }.to_str().unwrap();
        assert!(msg.contains("unknown root family"), "{msg}");
        assert!(h.is_null());
    }

    #[test]
    fn status_mapping() {
        assert_eq!(status_of(&Error::DimensionMismatch { expected: 2, got: 3 }), CwStatus::DimensionMismatch);
        assert_eq!(status_of(&Error::IllConditioned { log_condition: 40.0 }), CwStatus::Numerical);
        assert_eq!(status_of(&Error::NotZeroSum { sum: 1.0 }), CwStatus::InvalidArgument);
    }
}
