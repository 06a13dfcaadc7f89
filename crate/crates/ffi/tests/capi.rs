use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use droplet_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(droplet_last_error()) }.to_string_lossy().into_owned()
}

fn parse(spec: &str) -> *mut DropletKernel {
    let mut k = ptr::null_mut();
    let st = unsafe { droplet_kernel_parse(c(spec).as_ptr(), &mut k) };
    assert_eq!(st, DropletStatus::Ok, "{}", last_error());
    k
}

#[test]
fn kernel_round_trip_and_ball() {
    let k = parse("yukawa:alpha=1,kappa=0.56,n=3");
    unsafe {
        let s = droplet_kernel_to_string(k);
        assert_eq!(CStr::from_ptr(s).to_str().unwrap(), "yukawa:alpha=1,kappa=0.56,n=3");
        droplet_string_free(s);
        let mut out = DropletBallResult { rho: 0.0, r_star: 0.0, lambda_star: 0.0, regime: DropletRegime::RieszClosedForm };
        assert_eq!(droplet_rho_ball(k, &mut out), DropletStatus::Ok);
        assert_eq!(out.regime, DropletRegime::YukawaInterior);
        assert!((out.rho - 3.8755).abs() < 1e-4);
        assert!((out.lambda_star - 0.08848).abs() < 1e-4);
        droplet_kernel_free(k);
    }
}

#[test]
fn cylinder_calls() {
    let k = parse("trunc:alpha=1,kappa=1.1,n=3");
    unsafe {
        let mut s = 0.0;
        assert_eq!(droplet_sigma_cyl(k, 0.55, 0, &mut s), DropletStatus::Ok);
        assert!((s - 6.5989879).abs() < 1e-6);
        assert_eq!(droplet_sigma_cyl(k, 0.6, 0, &mut s), DropletStatus::Unsupported);
        let mut r = DropletCylResult { sigma: 0.0, l: 0.0 };
        assert_eq!(droplet_rho_cyl(k, 0, 0.0, &mut r), DropletStatus::Ok);
        assert!((r.sigma - 6.5989879).abs() < 1e-4 && r.l <= 0.55 && r.l > 0.549, "{r:?}");
        droplet_kernel_free(k);
    }
}

#[test]
fn error_statuses() {
    let mut k = ptr::null_mut();
    unsafe {
        assert_eq!(droplet_kernel_parse(c("bogus:alpha=1").as_ptr(), &mut k), DropletStatus::InvalidInput);
        assert!(k.is_null());
        assert!(last_error().contains("bogus"));
        assert_eq!(droplet_kernel_parse(ptr::null(), &mut k), DropletStatus::NullPointer);
        assert_eq!(droplet_kernel_parse(c("riesz:alpha=1,n=3").as_ptr(), ptr::null_mut()), DropletStatus::NullPointer);
        let mut s = 0.0;
        assert_eq!(droplet_sigma_cyl(ptr::null(), 1.0, 0, &mut s), DropletStatus::NullPointer);
        let k = parse("riesz:alpha=1,n=3");
        assert_eq!(droplet_sigma_cyl(k, 1.0, 0, &mut s), DropletStatus::Unsupported);
        droplet_kernel_free(k);
        droplet_kernel_free(ptr::null_mut());
        droplet_string_free(ptr::null_mut());
        droplet_report_free(ptr::null_mut());
        assert!(droplet_report_json(ptr::null()).is_null());
    }
}

#[test]
fn certify_trunc_reports() {
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(droplet_certify_trunc_coulomb(c("11/10").as_ptr(), 128, &mut rep), DropletStatus::Ok);
        let mut v = DropletVerdict::Inconclusive;
        assert_eq!(droplet_report_verdict(rep, &mut v), DropletStatus::Ok);
        assert_eq!(v, DropletVerdict::Certified);
        let (mut cu, mut bl) = (0.0, 0.0);
        assert_eq!(droplet_report_bounds(rep, &mut cu, &mut bl), DropletStatus::Ok);
        assert!(cu < bl);
        let j = droplet_report_json(rep);
        assert!(CStr::from_ptr(j).to_str().unwrap().contains("\"Certified\""));
        droplet_string_free(j);
        droplet_report_free(rep);

        let mut rep = ptr::null_mut();
        assert_eq!(droplet_certify_trunc_coulomb(c("11/10").as_ptr(), 24, &mut rep), DropletStatus::Inconclusive);
        assert!(!rep.is_null());
        droplet_report_free(rep);

        assert_eq!(droplet_certify_trunc_coulomb(c("eleven").as_ptr(), 128, &mut rep), DropletStatus::InvalidInput);
        assert!(rep.is_null());
    }
}

#[test]
fn certify_yukawa_sign_check() {
    unsafe {
        let mut rep = ptr::null_mut();
        let st = droplet_certify_yukawa(c("56/100").as_ptr(), c("209/100").as_ptr(), 200, c("1/10").as_ptr(), c("2/10").as_ptr(), 128, &mut rep);
        assert_eq!(st, DropletStatus::Inconclusive);
        assert!(rep.is_null());
        assert!(last_error().contains("sign"));
        let st = droplet_certify_yukawa(c("56/100").as_ptr(), c("209/100").as_ptr(), 200, c("0.0884").as_ptr(), c("0.0885").as_ptr(), 128, &mut rep);
        assert_eq!(st, DropletStatus::Inconclusive);
        assert!(!rep.is_null());
        droplet_report_free(rep);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("droplet.h")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "droplet_last_error",
        "droplet_kernel_parse",
        "droplet_kernel_free",
        "droplet_kernel_to_string",
        "droplet_rho_ball",
        "droplet_sigma_cyl",
        "droplet_rho_cyl",
        "droplet_certify_trunc_coulomb",
        "droplet_certify_yukawa",
        "droplet_report_free",
        "droplet_report_verdict",
        "droplet_report_bounds",
        "droplet_report_json",
        "droplet_string_free",
        "typedef struct DropletKernel DropletKernel;",
        "DROPLET_STATUS_UNSUPPORTED = 3",
    ] {
        assert!(h.contains(f), "missing {f}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "droplet.h"

int main(void) {
    DropletKernel *k = NULL;
    if (droplet_kernel_parse("riesz:alpha=1,n=3", &k) != DROPLET_STATUS_OK) return 10;
    DropletBallResult b;
    if (droplet_rho_ball(k, &b) != DROPLET_STATUS_OK) return 11;
    droplet_kernel_free(k);
    if (droplet_kernel_parse("nope", &k) != DROPLET_STATUS_INVALID_INPUT) return 12;
    if (droplet_last_error()[0] == '\0') return 13;
    printf("%.12f\n", b.rho);
    return 0;
}
"#;

/// Builds a C program against the generated header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let libdir = deps.parent().unwrap().to_path_buf();
    if !libdir.join("libdroplet_ffi.so").exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no shared library or C compiler");
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = tmp.path().join("main");
    let st = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg("-L")
        .arg(&libdir)
        .arg("-ldroplet_ffi")
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &libdir).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let rho: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    let exact = 4.5 * (16.0 * std::f64::consts::PI / 15.0).cbrt();
    assert!((rho - exact).abs() < 1e-10);
}
