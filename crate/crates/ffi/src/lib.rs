//! C ABI for orlicz-core.
//!
//! Young functions and measure spaces are opaque handles created by the
//! `orlicz_young_*` and `orlicz_space_atomic` constructors and released with
//! the matching `_free`.
//! Every fallible call returns an `OrliczStatus`; on failure the message is
//! available from `orlicz_last_error` until the next failing call on the same
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use orlicz_core::cli::{self, run::RunOptions, Format};
use orlicz_core::measure::{MeasurableFunction, MeasureSpace, Transformation};
use orlicz_core::operators::{check_comp, check_mult, Setting};
use orlicz_core::orlicz::luxemburg_norm;
use orlicz_core::range::{classify_comp, classify_mult, RangeClass, RangeReport};
use orlicz_core::trend::Budget;
use orlicz_core::young::conjugate;
use orlicz_core::{Error, Status, Verdict, YoungFunction};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Config = 4,
    Numerical = 5,
    Refused = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczVerdict {
    Certified = 0,
    Refuted = 1,
    Inconclusive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrliczRangeClass {
    FiniteRank = 0,
    NotClosedRange = 1,
    Inconclusive = 2,
}

/// Numerical settings. `orlicz_settings_default` fills the library defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OrliczSettings {
    /// Generated atoms realized from a family.
    pub budget_n: usize,
    /// Partial sums above this count as divergent.
    pub threshold: f64,
    pub tol: f64,
}

/// Opaque Young function.
pub struct OrliczYoung(YoungFunction);

/// Opaque measure space.
pub struct OrliczSpace(MeasureSpace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn fail(code: OrliczStatus, msg: impl Into<String>) -> OrliczStatus {
    set_error(msg);
    code
}

fn from_core(e: Error) -> OrliczStatus {
    let code = match e {
        Error::InvalidParameter(_) | Error::SpaceMismatch(_) | Error::Precondition(_) | Error::PartitionCap { .. } => {
            OrliczStatus::InvalidArgument
        }
        Error::Refused(_) => OrliczStatus::Refused,
        Error::ConjugateBracket { .. } | Error::Quadrature { .. } => OrliczStatus::Numerical,
    };
    fail(code, e.to_string())
}

/// Runs `f`, turning panics into `OrliczStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), OrliczStatus>) -> OrliczStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrliczStatus::Ok,
        Ok(Err(code)) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(OrliczStatus::Panic, msg)
        }
    }
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, OrliczStatus> {
    p.as_ref().ok_or_else(|| fail(OrliczStatus::NullPointer, "null handle"))
}

unsafe fn slice<'a, T>(p: *const T, n: usize) -> Result<&'a [T], OrliczStatus> {
    if n == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(fail(OrliczStatus::NullPointer, "null array"))
    } else {
        Ok(std::slice::from_raw_parts(p, n))
    }
}

fn out<T>(p: *mut T, v: T) -> Result<(), OrliczStatus> {
    if p.is_null() {
        return Err(fail(OrliczStatus::NullPointer, "null output pointer"));
    }
    unsafe { p.write(v) };
    Ok(())
}

fn setting(s: *const OrliczSettings) -> Setting {
    let mut st = Setting::default();
    if let Some(s) = unsafe { s.as_ref() } {
        st.budget = Budget {
            n: s.budget_n,
            threshold: s.threshold,
        };
        st.tol = s.tol;
    }
    st
}

fn verdict(v: &Verdict) -> OrliczVerdict {
    match v.status {
        Status::Certified => OrliczVerdict::Certified,
        Status::Refuted => OrliczVerdict::Refuted,
        Status::Inconclusive => OrliczVerdict::Inconclusive,
    }
}

fn range(r: &RangeReport) -> (OrliczRangeClass, usize) {
    match r.class {
        RangeClass::FiniteRank { rank } => (OrliczRangeClass::FiniteRank, rank),
        RangeClass::NotClosedRange { .. } => (OrliczRangeClass::NotClosedRange, 0),
        RangeClass::Inconclusive { .. } => (OrliczRangeClass::Inconclusive, 0),
    }
}

/// Message of the last failing call on this thread, or NULL. The pointer is
/// valid until the next failing call.
#[no_mangle]
pub extern "C" fn orlicz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn orlicz_settings_default() -> OrliczSettings {
    let s = Setting::default();
    OrliczSettings {
        budget_n: s.budget.n,
        threshold: s.budget.threshold,
        tol: s.tol,
    }
}

fn young_new(made: orlicz_core::Result<YoungFunction>, out_handle: *mut *mut OrliczYoung) -> OrliczStatus {
    guard(|| {
        let y = made.map_err(from_core)?;
        out(out_handle, Box::into_raw(Box::new(OrliczYoung(y))))
    })
}

/// `x^p / p`, `p > 1`.
#[no_mangle]
pub extern "C" fn orlicz_young_power(p: f64, out_handle: *mut *mut OrliczYoung) -> OrliczStatus {
    young_new(YoungFunction::power(p), out_handle)
}

/// `exp(x^p) - x^p - 1`, `p >= 1`.
#[no_mangle]
pub extern "C" fn orlicz_young_exp_power(p: f64, out_handle: *mut *mut OrliczYoung) -> OrliczStatus {
    young_new(YoungFunction::exp_power(p), out_handle)
}

/// `(1 + x^p) ln(1 + x^p) - x^p`, `p >= 1`.
#[no_mangle]
pub extern "C" fn orlicz_young_l_log_l(p: f64, out_handle: *mut *mut OrliczYoung) -> OrliczStatus {
    young_new(YoungFunction::l_log_l(p), out_handle)
}

/// Complementary function of `phi` as a new handle.
///
/// # Safety
/// `phi` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_complementary(phi: *const OrliczYoung, out_handle: *mut *mut OrliczYoung) -> OrliczStatus {
    guard(|| {
        let phi = deref(phi)?;
        out(out_handle, Box::into_raw(Box::new(OrliczYoung(phi.0.complementary()))))
    })
}

/// # Safety
/// `phi` must come from an `orlicz_young_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_free(phi: *mut OrliczYoung) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// # Safety
/// `phi` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_evaluate(phi: *const OrliczYoung, x: f64, out_value: *mut f64) -> OrliczStatus {
    guard(|| out(out_value, deref(phi)?.0.evaluate(x)))
}

/// `sup_x (xy - Φ(x))` for `y >= 0`.
///
/// # Safety
/// `phi` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn orlicz_young_conjugate(phi: *const OrliczYoung, y: f64, tol: f64, out_value: *mut f64) -> OrliczStatus {
    guard(|| {
        let v = conjugate(&deref(phi)?.0, y, tol).map_err(from_core)?;
        out(out_value, v)
    })
}

/// Purely atomic space with the given positive masses.
///
/// # Safety
/// `masses` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_space_atomic(masses: *const f64, n: usize, out_handle: *mut *mut OrliczSpace) -> OrliczStatus {
    guard(|| {
        let s = MeasureSpace::atomic(slice(masses, n)?).map_err(from_core)?;
        out(out_handle, Box::into_raw(Box::new(OrliczSpace(s))))
    })
}

/// # Safety
/// `space` must come from `orlicz_space_atomic` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_space_free(space: *mut OrliczSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of atoms of `space`.
///
/// # Safety
/// `space` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn orlicz_space_atoms(space: *const OrliczSpace, out_count: *mut usize) -> OrliczStatus {
    guard(|| out(out_count, deref(space)?.0.atoms().len()))
}

unsafe fn atom_values(space: &OrliczSpace, values: *const f64, n: usize) -> Result<MeasurableFunction, OrliczStatus> {
    let v = slice(values, n)?;
    if v.len() != space.0.atoms().len() {
        return Err(fail(
            OrliczStatus::InvalidArgument,
            format!("{} values for {} atoms", v.len(), space.0.atoms().len()),
        ));
    }
    Ok(MeasurableFunction::atomic(v.to_vec()))
}

unsafe fn atom_map(space: &OrliczSpace, map: *const usize, n: usize) -> Result<Transformation, OrliczStatus> {
    let m = slice(map, n)?;
    if m.len() != space.0.atoms().len() {
        return Err(fail(
            OrliczStatus::InvalidArgument,
            format!("{} map entries for {} atoms", m.len(), space.0.atoms().len()),
        ));
    }
    Ok(Transformation::atomic(m))
}

/// Luxemburg norm of the function with atom values `values`.
///
/// # Safety
/// Handles must be live or NULL; `values` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_luxemburg_norm(
    space: *const OrliczSpace,
    values: *const f64,
    n: usize,
    phi: *const OrliczYoung,
    tol: f64,
    out_norm: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let space = deref(space)?;
        let f = atom_values(space, values, n)?;
        let r = luxemburg_norm(&space.0, &f, &deref(phi)?.0, tol, &Budget::default()).map_err(from_core)?;
        out(out_norm, r.value)
    })
}

/// Boundedness of `M_u : L^{Φ₁} → L^{Φ₂}`. `phi3` may be NULL. `out_bound`
/// receives the certified operator-norm bound or NaN.
///
/// # Safety
/// Handles must be live or NULL (`phi3`, `settings` optional); `u` must point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn orlicz_check_mult(
    space: *const OrliczSpace,
    u: *const f64,
    n: usize,
    phi1: *const OrliczYoung,
    phi2: *const OrliczYoung,
    phi3: *const OrliczYoung,
    settings: *const OrliczSettings,
    out_verdict: *mut OrliczVerdict,
    out_bound: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let space = deref(space)?;
        let u = atom_values(space, u, n)?;
        let p3 = phi3.as_ref().map(|p| &p.0);
        let v = check_mult(&space.0, &u, &deref(phi1)?.0, &deref(phi2)?.0, p3, None, &setting(settings))
            .map_err(from_core)?;
        out(out_verdict, verdict(&v))?;
        if !out_bound.is_null() {
            out(out_bound, v.bound.unwrap_or(f64::NAN))?;
        }
        Ok(())
    })
}

/// Boundedness of `C_T` for the atom map `map` (atom `i` goes to `map[i]`).
///
/// # Safety
/// As for `orlicz_check_mult`; `map` must point to `n` indices.
#[no_mangle]
pub unsafe extern "C" fn orlicz_check_comp(
    space: *const OrliczSpace,
    map: *const usize,
    n: usize,
    phi1: *const OrliczYoung,
    phi2: *const OrliczYoung,
    phi3: *const OrliczYoung,
    settings: *const OrliczSettings,
    out_verdict: *mut OrliczVerdict,
    out_bound: *mut f64,
) -> OrliczStatus {
    guard(|| {
        let space = deref(space)?;
        let t = atom_map(space, map, n)?;
        let p3 = phi3.as_ref().map(|p| &p.0);
        let v = check_comp(&space.0, &t, &deref(phi1)?.0, &deref(phi2)?.0, p3, &setting(settings)).map_err(from_core)?;
        out(out_verdict, verdict(&v))?;
        if !out_bound.is_null() {
            out(out_bound, v.bound.unwrap_or(f64::NAN))?;
        }
        Ok(())
    })
}

/// Range class of `M_u`. `out_rank` is set for finite rank, else 0.
///
/// # Safety
/// As for `orlicz_check_mult`.
#[no_mangle]
pub unsafe extern "C" fn orlicz_classify_mult(
    space: *const OrliczSpace,
    u: *const f64,
    n: usize,
    phi1: *const OrliczYoung,
    phi2: *const OrliczYoung,
    phi3: *const OrliczYoung,
    settings: *const OrliczSettings,
    out_class: *mut OrliczRangeClass,
    out_rank: *mut usize,
) -> OrliczStatus {
    guard(|| {
        let space = deref(space)?;
        let u = atom_values(space, u, n)?;
        let p3 = phi3.as_ref().map(|p| &p.0);
        let r = classify_mult(&space.0, &u, &deref(phi1)?.0, &deref(phi2)?.0, p3, &setting(settings)).map_err(from_core)?;
        let (class, rank) = range(&r);
        out(out_class, class)?;
        out(out_rank, rank)
    })
}

/// Range class of `C_T`.
///
/// # Safety
/// As for `orlicz_check_comp`.
#[no_mangle]
pub unsafe extern "C" fn orlicz_classify_comp(
    space: *const OrliczSpace,
    map: *const usize,
    n: usize,
    phi1: *const OrliczYoung,
    phi2: *const OrliczYoung,
    phi3: *const OrliczYoung,
    settings: *const OrliczSettings,
    out_class: *mut OrliczRangeClass,
    out_rank: *mut usize,
) -> OrliczStatus {
    guard(|| {
        let space = deref(space)?;
        let t = atom_map(space, map, n)?;
        let p3 = phi3.as_ref().map(|p| &p.0);
        let r = classify_comp(&space.0, &t, &deref(phi1)?.0, &deref(phi2)?.0, p3, &setting(settings)).map_err(from_core)?;
        let (class, rank) = range(&r);
        out(out_class, class)?;
        out(out_rank, rank)
    })
}

/// Runs every request of a TOML analysis config and returns the report as
/// JSON (`machine != 0`) or text. Free the result with `orlicz_string_free`.
///
/// # Safety
/// `config` must be a NUL-terminated string or NULL.
#[no_mangle]
pub unsafe extern "C" fn orlicz_run_config(config: *const c_char, machine: i32, out_report: *mut *mut c_char) -> OrliczStatus {
    guard(|| {
        if config.is_null() {
            return Err(fail(OrliczStatus::NullPointer, "null config"));
        }
        let text = CStr::from_ptr(config)
            .to_str()
            .map_err(|e| fail(OrliczStatus::InvalidUtf8, e.to_string()))?;
        let cfg = cli::parse_config(text).map_err(|e| fail(OrliczStatus::Config, e.to_string()))?;
        let format = if machine != 0 { Format::Machine } else { Format::Text };
        let body = cli::run(&cfg, &RunOptions::default()).render(format);
        let s = CString::new(body.replace('\0', " ")).expect("NUL bytes removed");
        out(out_report, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn orlicz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
