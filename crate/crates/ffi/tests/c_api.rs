use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use chamberwalk_ffi::*;

struct Handle(*mut CwRootSystem);

impl Handle {
    fn new(family: u8, rank: usize) -> Self {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { cw_root_system_new(family as c_char, rank, &mut h) }, CwStatus::Ok);
        Handle(h)
    }
}

impl Drop for Handle {
    fn drop(&mut self) {
        unsafe { cw_root_system_free(self.0) }
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(cw_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn rho_and_dimension() {
    let h = Handle::new(b'D', 4);
    assert_eq!(unsafe { cw_root_system_dim(h.0) }, 4);
    let mut rho = [0.0; 4];
    assert_eq!(unsafe { cw_root_system_rho(h.0, rho.as_mut_ptr(), 4) }, CwStatus::Ok);
    assert_eq!(rho, [6.0, 4.0, 2.0, 0.0]);
    let mut short = [0.0; 3];
    assert_eq!(unsafe { cw_root_system_rho(h.0, short.as_mut_ptr(), 3) }, CwStatus::DimensionMismatch);
    assert!(last_error().contains("dimension mismatch"));
}

#[test]
fn semicharacter_and_m1_rank_one() {
    let h = Handle::new(b'A', 1);
    let x = [1.0, -1.0];
    let mut s = 0.0;
    assert_eq!(unsafe { cw_semicharacter(h.0, x.as_ptr(), 2, &mut s) }, CwStatus::Ok);
    assert!((s - 2f64.sinh() / 2.0).abs() < 1e-14);
    let mut m = [0.0; 2];
    assert_eq!(unsafe { cw_m1(h.0, x.as_ptr(), 2, m.as_mut_ptr()) }, CwStatus::Ok);
    let want = 1.0 / 2f64.tanh() - 0.5;
    assert!((m[0] - want).abs() < 1e-12 && (m[1] + want).abs() < 1e-12);
}

#[test]
fn psi_over_phi_is_semicharacter() {
    let h = Handle::new(b'B', 3);
    let x = [1.1, 0.6, 0.2];
    let l = [0.9, -0.4, 1.7];
    let mut psi = CwSphericalValue { re: 0.0, im: 0.0, est_abs_error: 0.0, regularized: false };
    let mut phi = psi;
    let mut s = 0.0;
    unsafe {
        assert_eq!(cw_spherical_psi(h.0, l.as_ptr(), ptr::null(), x.as_ptr(), 3, &mut psi), CwStatus::Ok);
        assert_eq!(cw_spherical_phi(h.0, l.as_ptr(), ptr::null(), x.as_ptr(), 3, &mut phi), CwStatus::Ok);
        assert_eq!(cw_semicharacter(h.0, x.as_ptr(), 3, &mut s), CwStatus::Ok);
    }
    assert!((phi.re * s - psi.re).abs() < 1e-10 && psi.im.abs() < 1e-12);
    assert!(!psi.regularized);
}

#[test]
fn chamber_projection() {
    let h = Handle::new(b'B', 2);
    let v = [-0.5, 2.0];
    let mut out = [0.0; 2];
    assert_eq!(unsafe { cw_chamber_project(h.0, v.as_ptr(), 2, out.as_mut_ptr()) }, CwStatus::Ok);
    assert_eq!(out, [2.0, 0.5]);
}

#[test]
fn null_and_invalid_inputs() {
    let mut s = 0.0;
    assert_eq!(unsafe { cw_semicharacter(ptr::null(), ptr::null(), 0, &mut s) }, CwStatus::NullPointer);
    let h = Handle::new(b'A', 1);
    let bad = [1.0, 2.0];
    let mut out = [0.0; 2];
    assert_eq!(unsafe { cw_m1(h.0, bad.as_ptr(), 2, out.as_mut_ptr()) }, CwStatus::InvalidArgument);
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { cw_root_system_new(b'C' as c_char, 2, &mut none) }, CwStatus::InvalidArgument);
    assert!(last_error().contains("rank 2"));
}

#[test]
fn walk_round_trip() {
    let cfg = CString::new(r#"{"d": 2, "mu": [{"point": [0.5, -0.5], "weight": 1.0}], "n_steps": 200, "seed": 3}"#).unwrap();
    let mut out: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { cw_walk_json(cfg.as_ptr(), &mut out) }, CwStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_string_lossy().into_owned();
    unsafe { cw_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["n_steps"], 200);
    let bad = CString::new(r#"{"d": 2}"#).unwrap();
    let mut out2: *mut c_char = ptr::null_mut();
    assert_eq!(unsafe { cw_walk_json(bad.as_ptr(), &mut out2) }, CwStatus::Serialization);
    assert!(out2.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/chamberwalk.h")).unwrap();
    for sym in [
        "cw_last_error_message",
        "cw_root_system_new",
        "cw_root_system_free",
        "cw_root_system_dim",
        "cw_root_system_rho",
        "cw_semicharacter",
        "cw_spherical_psi",
        "cw_spherical_phi",
        "cw_m1",
        "cw_chamber_project",
        "cw_walk_json",
        "cw_string_free",
        "typedef struct CwRootSystem CwRootSystem",
        "CW_STATUS_DIMENSION_MISMATCH = 3",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "chamberwalk.h"

int main(void) {
    CwRootSystem *rs = NULL;
    if (cw_root_system_new('A', 2, &rs) != CW_STATUS_OK) return 10;
    double x[3] = {1.0, 0.0, -1.0};
    double s = 0.0;
    if (cw_semicharacter(rs, x, 3, &s) != CW_STATUS_OK) return 11;
    double want = sinh(1.0) * sinh(1.0) * sinh(2.0) / 2.0;
    if (fabs(s - want) > 1e-12) return 12;
    double y[2] = {1.0, 2.0};
    if (cw_semicharacter(rs, y, 2, &s) != CW_STATUS_DIMENSION_MISMATCH) return 13;
    if (cw_last_error_message() == NULL) return 14;
    cw_root_system_free(rs);
    printf("ok\n");
    return 0;
}
"#;

fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libchamberwalk_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_static_library() {
    let lib = static_lib().expect("libchamberwalk_ffi.a next to the test binary");
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("cw_smoke.c");
    let bin = tmp.join("cw_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
