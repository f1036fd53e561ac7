//! C ABI over the suspension-lab kernels.
//!
//! Every fallible function returns an [`SlStatus`] and writes its result
//! through out-pointers. On failure the message is kept per thread and can be
//! read with [`sl_last_error_message`]. Profiles and reports are opaque
//! handles owned by the caller and released with their `_free` functions;
//! strings returned by the library are released with [`sl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use suspension_lab::criteria::{
    classify, hellinger_growth, rn_square_integral, ClassificationReport, Verdict,
};
use suspension_lab::dist::{bessel_i, hellinger_sq_poisson, poisson_log_pmf};
use suspension_lab::intensity::{eval_intensity, Sign};
use suspension_lab::{EpsilonFamily, Error, IntensityProfile, SkellamLaw};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    Precondition = 4,
    Coverage = 5,
    Anomaly = 6,
    Internal = 7,
    Utf8 = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlVerdict {
    Conservative = 0,
    TotallyDissipative = 1,
    Inconclusive = 2,
    NotNonsingular = 3,
}

impl From<Verdict> for SlVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Conservative => SlVerdict::Conservative,
            Verdict::TotallyDissipative => SlVerdict::TotallyDissipative,
            Verdict::Inconclusive => SlVerdict::Inconclusive,
            Verdict::NotNonsingular => SlVerdict::NotNonsingular,
        }
    }
}

/// Opaque intensity profile.
pub struct SlProfile(IntensityProfile);

/// Opaque classification report.
pub struct SlReport(ClassificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut msg = msg.into();
    msg.retain(|c| c != '\0');
    let c = CString::new(msg).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(SlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Profile(_) | Error::InvalidArgument(_) => SlStatus::InvalidArgument,
            Error::Dist(_) => SlStatus::DomainError,
            Error::Precondition(_) => SlStatus::Precondition,
            Error::Coverage { .. } => SlStatus::Coverage,
            Error::MonotonicityViolated(_) => SlStatus::Anomaly,
            Error::Internal(_) => SlStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

impl From<suspension_lab::DistError> for Failure {
    fn from(e: suspension_lab::DistError) -> Self {
        Error::from(e).into()
    }
}

impl From<suspension_lab::ProfileError> for Failure {
    fn from(e: suspension_lab::ProfileError) -> Self {
        Error::from(e).into()
    }
}

fn null(what: &str) -> Failure {
    Failure(SlStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(SlStatus::InvalidArgument, msg.into())
}

/// Runs `f`, records any failure or panic, and returns the status.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> SlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SlStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SlStatus::Internal
        }
    }
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn profile_ref<'a>(p: *const SlProfile) -> Result<&'a IntensityProfile, Failure> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("profile"))
}

unsafe fn emit_profile(p: IntensityProfile, out: *mut *mut SlProfile) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(SlProfile(p))));
    Ok(())
}

fn string_out(s: String) -> *mut c_char {
    let mut s = s;
    s.retain(|c| c != '\0');
    CString::new(s).expect("nul bytes removed").into_raw()
}

/// `a_n = base * scale * exp(sign * n^-gamma)` for `n > 1`, `base * scale` elsewhere.
/// `sign` must be `1` or `-1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_new_power(
    base: f64,
    scale: f64,
    gamma: f64,
    sign: i32,
    out: *mut *mut SlProfile,
) -> SlStatus {
    guard(|| {
        let sign = i8::try_from(sign)
            .ok()
            .and_then(|s| Sign::try_from(s).ok())
            .ok_or_else(|| invalid("sign must be 1 or -1"))?;
        let p =
            IntensityProfile::new(base, EpsilonFamily::Power { gamma, sign })?.with_scale(scale)?;
        emit_profile(p, out)
    })
}

/// Constant intensity `base * scale`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_new_zero(
    base: f64,
    scale: f64,
    out: *mut *mut SlProfile,
) -> SlStatus {
    guard(|| {
        let p = IntensityProfile::new(base, EpsilonFamily::Zero)?.with_scale(scale)?;
        emit_profile(p, out)
    })
}

/// `eps_n = left` for `n <= 0` and `right` for `n >= 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_new_step(
    base: f64,
    scale: f64,
    left: f64,
    right: f64,
    out: *mut *mut SlProfile,
) -> SlStatus {
    guard(|| {
        let p =
            IntensityProfile::new(base, EpsilonFamily::Step { left, right })?.with_scale(scale)?;
        emit_profile(p, out)
    })
}

/// Profile from its JSON document, e.g.
/// `{"base": 1, "epsilon": {"kind": "power", "gamma": 0.5, "sign": -1}}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_from_json(
    json: *const c_char,
    out: *mut *mut SlProfile,
) -> SlStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure(SlStatus::Utf8, e.to_string()))?;
        let p: IntensityProfile = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        p.validate()?;
        emit_profile(p, out)
    })
}

/// # Safety
/// `profile` must come from an `sl_profile_*` constructor and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sl_profile_free(profile: *mut SlProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// `a_n` for the profile.
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_eval_intensity(
    profile: *const SlProfile,
    n: i64,
    out: *mut f64,
) -> SlStatus {
    guard(|| write(out, eval_intensity(profile_ref(profile)?, n), "out"))
}

/// `ln P(N = k)` for `N ~ Poisson(rate)`; `DomainError` when the mass is zero.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_poisson_log_pmf(rate: f64, k: u64, out: *mut f64) -> SlStatus {
    guard(|| write(out, poisson_log_pmf(rate, k)?, "out"))
}

/// Modified Bessel function `I_k(z)` for `z >= 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_bessel_i(k: i64, z: f64, out: *mut f64) -> SlStatus {
    guard(|| {
        if !(z.is_finite() && z >= 0.0) {
            return Err(invalid("z must be finite and nonnegative"));
        }
        write(out, bessel_i(k, z), "out")
    })
}

/// `P(X - Y = k)` for independent `X ~ Poisson(a)`, `Y ~ Poisson(b)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_skellam_pmf(a: f64, b: f64, k: i64, out: *mut f64) -> SlStatus {
    guard(|| write(out, SkellamLaw::new(a, b)?.pmf(k), "out"))
}

/// Characteristic function of the Skellam law at `t`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_skellam_cf(
    a: f64,
    b: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> SlStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("out"));
        }
        let z = SkellamLaw::new(a, b)?.cf(t);
        write(re, z.re, "re")?;
        write(im, z.im, "im")
    })
}

/// `P(|X - Y| >= l)` and its analytic bound, for `l >= 1`.
///
/// # Safety
/// `exact` and `bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_skellam_tail(
    a: f64,
    b: f64,
    l: u32,
    exact: *mut f64,
    bound: *mut f64,
) -> SlStatus {
    guard(|| {
        if exact.is_null() || bound.is_null() {
            return Err(null("out"));
        }
        let t = SkellamLaw::new(a, b)?.tail(l)?;
        write(exact, t.exact, "exact")?;
        write(bound, t.bound, "bound")
    })
}

/// Squared Hellinger distance between `Poisson(a)` and `Poisson(b)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_hellinger_sq_poisson(a: f64, b: f64, out: *mut f64) -> SlStatus {
    guard(|| write(out, hellinger_sq_poisson(a, b)?, "out"))
}

/// `I(n)`, the integral of the squared density ratio minus one, to
/// absolute tolerance `tol`; `Precondition` when `chi != 0`.
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_rn_square_integral(
    profile: *const SlProfile,
    n: u64,
    tol: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        check_tol(tol)?;
        write(
            out,
            rn_square_integral(profile_ref(profile)?, n, tol)?,
            "out",
        )
    })
}

/// `H(n)`, the squared Hellinger growth of the shift by `n`.
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_hellinger_growth(
    profile: *const SlProfile,
    n: u64,
    tol: f64,
    out: *mut f64,
) -> SlStatus {
    guard(|| {
        check_tol(tol)?;
        write(out, hellinger_growth(profile_ref(profile)?, n, tol)?, "out")
    })
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(invalid("tol must be positive"))
    }
}

/// Conservative / dissipative verdict with its certificate.
///
/// # Safety
/// `profile` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_classify(
    profile: *const SlProfile,
    out: *mut *mut SlReport,
) -> SlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let report = classify(profile_ref(profile)?)?;
        out.write(Box::into_raw(Box::new(SlReport(report))));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_report_verdict(
    report: *const SlReport,
    out: *mut SlVerdict,
) -> SlStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        write(out, r.0.verdict.into(), "out")
    })
}

/// The full report as JSON; release with [`sl_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_report_to_json(
    report: *const SlReport,
    out: *mut *mut c_char,
) -> SlStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let text =
            serde_json::to_string(&r.0).map_err(|e| Failure(SlStatus::Internal, e.to_string()))?;
        write(out, string_out(text), "out")
    })
}

/// # Safety
/// `report` must come from [`sl_classify`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sl_report_free(report: *mut SlReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
