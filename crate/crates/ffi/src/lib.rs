//! C ABI for the `droplet` library.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every entry point returns a
//! [`DropletStatus`]; on failure [`droplet_last_error`] describes the cause.
//! Strings returned by the library are freed with [`droplet_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use droplet::ball::{rho_ball, BallRegime};
use droplet::certify::{certify_trunc_coulomb, certify_yukawa, CertificationReport, Verdict};
use droplet::cylinder::{rho_cyl, sigma_cyl, CylSearch};
use droplet::kernels::Kernel;
use droplet::specfun::parse_rational;
use droplet::Error;

/// Status codes, numerically equal to the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropletStatus {
    Ok = 0,
    /// Certification ran but did not separate the bounds, or the sign check failed.
    Inconclusive = 1,
    InvalidInput = 2,
    Unsupported = 3,
    Internal = 4,
    NullPointer = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropletVerdict {
    Certified = 0,
    Inconclusive = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropletRegime {
    RieszClosedForm = 0,
    TruncSubcritical = 1,
    TruncIntermediate = 2,
    TruncRieszRegime = 3,
    YukawaFlat = 4,
    YukawaInterior = 5,
}

impl From<BallRegime> for DropletRegime {
    fn from(r: BallRegime) -> Self {
        match r {
            BallRegime::RieszClosedForm => DropletRegime::RieszClosedForm,
            BallRegime::TruncSubcritical => DropletRegime::TruncSubcritical,
            BallRegime::TruncIntermediate => DropletRegime::TruncIntermediate,
            BallRegime::TruncRieszRegime => DropletRegime::TruncRieszRegime,
            BallRegime::YukawaFlat => DropletRegime::YukawaFlat,
            BallRegime::YukawaInterior => DropletRegime::YukawaInterior,
        }
    }
}

/// Optimal ball ratio. `r_star` is +inf when the infimum is not attained and
/// NaN when not reported; `lambda_star` is NaN except for Yukawa kernels.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DropletBallResult {
    pub rho: f64,
    pub r_star: f64,
    pub lambda_star: f64,
    pub regime: DropletRegime,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct DropletCylResult {
    pub sigma: f64,
    pub l: f64,
}

/// Opaque interaction kernel.
pub struct DropletKernel {
    inner: Kernel,
}

/// Opaque certification report.
pub struct DropletReport {
    inner: CertificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DropletStatus {
    match e {
        Error::SignCheck(_) => DropletStatus::Inconclusive,
        Error::Parse(_) | Error::Domain(_) | Error::Grid(_) => DropletStatus::InvalidInput,
        Error::Unsupported(_) => DropletStatus::Unsupported,
        Error::NoConvergence(_) | Error::Io(_) | Error::Json(_) => DropletStatus::Internal,
    }
}

enum Fail {
    Null(&'static str),
    Input(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<DropletStatus, Fail>) -> DropletStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == DropletStatus::Ok {
                set_error("");
            }
            s
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            DropletStatus::NullPointer
        }
        Ok(Err(Fail::Input(msg))) => {
            set_error(&msg);
            DropletStatus::InvalidInput
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            DropletStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Input(format!("{what} is not valid UTF-8")))
}

unsafe fn rational_arg(p: *const c_char, what: &'static str) -> Result<num_rational::BigRational, Fail> {
    let s = str_arg(p, what)?;
    parse_rational(s).ok_or_else(|| Fail::Input(format!("{what}: not a rational number: `{s}`")))
}

unsafe fn kernel_ref<'a>(k: *const DropletKernel) -> Result<&'a Kernel, Fail> {
    k.as_ref().map(|k| &k.inner).ok_or(Fail::Null("kernel"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn droplet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a kernel spec such as `yukawa:alpha=1,kappa=0.56,n=3`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_kernel_parse(spec: *const c_char, out: *mut *mut DropletKernel) -> DropletStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = ptr::null_mut();
        let k: Kernel = str_arg(spec, "spec")?.parse()?;
        *out = Box::into_raw(Box::new(DropletKernel { inner: k }));
        Ok(DropletStatus::Ok)
    })
}

/// # Safety
/// `k` must come from [`droplet_kernel_parse`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn droplet_kernel_free(k: *mut DropletKernel) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Canonical spec string of the kernel; free with [`droplet_string_free`].
///
/// # Safety
/// `k` must be a live kernel handle or null.
#[no_mangle]
pub unsafe extern "C" fn droplet_kernel_to_string(k: *const DropletKernel) -> *mut c_char {
    match k.as_ref() {
        Some(k) => into_c_string(k.inner.to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `k` must be a live kernel handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_rho_ball(k: *const DropletKernel, out: *mut DropletBallResult) -> DropletStatus {
    guard(|| {
        let k = kernel_ref(k)?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let b = rho_ball(k)?;
        *out = DropletBallResult {
            rho: b.rho.approx(),
            r_star: b.r_star.unwrap_or(f64::NAN),
            lambda_star: b.lambda_star.unwrap_or(f64::NAN),
            regime: b.regime.into(),
        };
        Ok(DropletStatus::Ok)
    })
}

/// σ_cyl at radius `l` with `n_quad` Simpson subintervals (0 for the default).
///
/// # Safety
/// `k` must be a live kernel handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_sigma_cyl(k: *const DropletKernel, l: f64, n_quad: usize, out: *mut f64) -> DropletStatus {
    guard(|| {
        let k = kernel_ref(k)?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let n = if n_quad == 0 { CylSearch::default_for(k).n_quad } else { n_quad };
        *out = sigma_cyl(k, l, n)?.sigma.approx();
        Ok(DropletStatus::Ok)
    })
}

/// Minimizes σ_cyl over the default search interval. Zero `n_quad` or
/// non-positive `tol` select the defaults.
///
/// # Safety
/// `k` must be a live kernel handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_rho_cyl(k: *const DropletKernel, n_quad: usize, tol: f64, out: *mut DropletCylResult) -> DropletStatus {
    guard(|| {
        let k = kernel_ref(k)?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        let mut search = CylSearch::default_for(k);
        if n_quad != 0 {
            search.n_quad = n_quad;
        }
        if tol > 0.0 {
            search.tol = tol;
        }
        let r = rho_cyl(k, search)?;
        *out = DropletCylResult { sigma: r.sigma.approx(), l: r.l };
        Ok(DropletStatus::Ok)
    })
}

unsafe fn report_status(rep: CertificationReport, out: *mut *mut DropletReport) -> DropletStatus {
    let certified = rep.is_certified();
    if !certified {
        set_error(&rep.notes.join("; "));
    }
    *out = Box::into_raw(Box::new(DropletReport { inner: rep }));
    if certified {
        DropletStatus::Ok
    } else {
        DropletStatus::Inconclusive
    }
}

/// Certifies σ_cyl(κ/2) < ρ_ball for the truncated Coulomb kernel.
/// `kappa` is `p/q` or a decimal. A report is stored in `*out` whenever the
/// status is `Ok` or `Inconclusive`.
///
/// # Safety
/// `kappa` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_certify_trunc_coulomb(kappa: *const c_char, precision: u32, out: *mut *mut DropletReport) -> DropletStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = ptr::null_mut();
        let rep = certify_trunc_coulomb(&rational_arg(kappa, "kappa")?, precision)?;
        Ok(report_status(rep, out))
    })
}

/// Certifies σ_cyl(l) < ρ_ball for the Yukawa kernel with an `n`-cell Riemann
/// upper bound and the bracket `[a, b]` around λ*. A failed sign check returns
/// `Inconclusive` with `*out` left null.
///
/// # Safety
/// String arguments must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_certify_yukawa(
    kappa: *const c_char,
    l: *const c_char,
    n: u64,
    a: *const c_char,
    b: *const c_char,
    precision: u32,
    out: *mut *mut DropletReport,
) -> DropletStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        *out = ptr::null_mut();
        let (kappa, l) = (rational_arg(kappa, "kappa")?, rational_arg(l, "l")?);
        let (a, b) = (rational_arg(a, "a")?, rational_arg(b, "b")?);
        let rep = certify_yukawa(&kappa, &l, n, (&a, &b), precision)?;
        Ok(report_status(rep, out))
    })
}

/// # Safety
/// `r` must come from a certify call and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn droplet_report_free(r: *mut DropletReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn droplet_report_verdict(r: *const DropletReport, out: *mut DropletVerdict) -> DropletStatus {
    guard(|| {
        let r = r.as_ref().ok_or(Fail::Null("report"))?;
        let out = out.as_mut().ok_or(Fail::Null("out"))?;
        *out = match r.inner.verdict {
            Verdict::Certified => DropletVerdict::Certified,
            Verdict::Inconclusive => DropletVerdict::Inconclusive,
        };
        Ok(DropletStatus::Ok)
    })
}

/// Outward-rounded endpoints: the largest value of the cylinder enclosure and
/// the smallest value of the ball enclosure.
///
/// # Safety
/// `r` must be a live report handle; output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn droplet_report_bounds(r: *const DropletReport, cyl_upper: *mut f64, ball_lower: *mut f64) -> DropletStatus {
    guard(|| {
        let r = r.as_ref().ok_or(Fail::Null("report"))?;
        let cu = cyl_upper.as_mut().ok_or(Fail::Null("cyl_upper"))?;
        let bl = ball_lower.as_mut().ok_or(Fail::Null("ball_lower"))?;
        *cu = r.inner.upper_bound_cyl.hi;
        *bl = r.inner.lower_bound_ball.lo;
        Ok(DropletStatus::Ok)
    })
}

/// JSON form of the report; free with [`droplet_string_free`]. Null on failure.
///
/// # Safety
/// `r` must be a live report handle or null.
#[no_mangle]
pub unsafe extern "C" fn droplet_report_json(r: *const DropletReport) -> *mut c_char {
    let Some(r) = r.as_ref() else {
        set_error("null pointer: report");
        return ptr::null_mut();
    };
    match r.inner.to_json() {
        Ok(s) => into_c_string(s),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn droplet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
