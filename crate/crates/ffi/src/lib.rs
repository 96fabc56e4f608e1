//! C ABI over the symcartan engine.
//!
//! Every fallible call returns a [`SymcartanStatus`]; on failure the message is
//! available from [`symcartan_last_error`] until the next call on the same
//! thread. Strings returned through `out` pointers are owned by the caller and
//! must be released with [`symcartan_string_free`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use symcartan::calculus::FieldFile;
use symcartan::cartan::PathSpec;
use symcartan::commands::{eval_fields, holonomy_of, ActionName, EvalOptions};
use symcartan::report::Report;
use symcartan::suite::{run_suite, SuiteConfig};
use symcartan::{Error, Q};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymcartanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Precondition = 4,
    Numerical = 5,
    Io = 6,
    /// A verification run finished with failing checks.
    ChecksFailed = 7,
    Panic = 8,
}

/// Parsed field file.
pub struct SymcartanFields(FieldFile);

/// Finished verification report.
pub struct SymcartanReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SymcartanStatus {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::UnknownAlgebra(_) | Error::InvalidPath(_) => SymcartanStatus::Parse,
        Error::Io(_) => SymcartanStatus::Io,
        Error::DegenerateCoframe(_) | Error::NonInvertible(_) => SymcartanStatus::Numerical,
        _ => SymcartanStatus::Precondition,
    }
}

struct Fail(SymcartanStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<SymcartanStatus, Fail>) -> SymcartanStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            SymcartanStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SymcartanStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(SymcartanStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn opt_q(p: *const c_char, what: &str) -> Result<Option<Q>, Fail> {
    if p.is_null() {
        return Ok(None);
    }
    Ok(Some(text(p, what)?.parse()?))
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SymcartanStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(SymcartanStatus::NullPointer, "output pointer is null".into()));
    }
    Ok(())
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call on the same thread.
#[no_mangle]
pub extern "C" fn symcartan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn symcartan_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn symcartan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a field file from JSON text.
#[no_mangle]
pub unsafe extern "C" fn symcartan_fields_from_json(
    json: *const c_char,
    out: *mut *mut SymcartanFields,
) -> SymcartanStatus {
    guard(|| {
        check_out(out)?;
        let file: FieldFile = text(json, "json")?.parse()?;
        *out = Box::into_raw(Box::new(SymcartanFields(file)));
        Ok(SymcartanStatus::Ok)
    })
}

/// Reads a field file from disk.
#[no_mangle]
pub unsafe extern "C" fn symcartan_fields_load(path: *const c_char, out: *mut *mut SymcartanFields) -> SymcartanStatus {
    guard(|| {
        check_out(out)?;
        let file = FieldFile::load(text(path, "path")?)?;
        *out = Box::into_raw(Box::new(SymcartanFields(file)));
        Ok(SymcartanStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn symcartan_fields_free(fields: *mut SymcartanFields) {
    if !fields.is_null() {
        drop(Box::from_raw(fields));
    }
}

/// Evaluates `action` (`cs`, `palatini`, `cs_omega_torsion`, `tmg`, `mm`) and
/// writes the result as JSON. Couplings are rational strings such as `"1/3"`
/// or null; `grid` 0 selects the default quadrature grid.
#[no_mangle]
pub unsafe extern "C" fn symcartan_eval_action(
    fields: *const SymcartanFields,
    action: *const c_char,
    c0: *const c_char,
    c1: *const c_char,
    mu: *const c_char,
    gamma: *const c_char,
    grid: usize,
    out_json: *mut *mut c_char,
) -> SymcartanStatus {
    guard(|| {
        let f = fields.as_ref().ok_or_else(|| Fail(SymcartanStatus::NullPointer, "fields is null".into()))?;
        let action: ActionName = text(action, "action")?.parse()?;
        let opts = EvalOptions {
            c0: opt_q(c0, "c0")?,
            c1: opt_q(c1, "c1")?,
            mu: opt_q(mu, "mu")?,
            gamma: opt_q(gamma, "gamma")?,
            grid: (grid > 0).then_some(grid),
        };
        let r = eval_fields(&f.0, action, &opts)?;
        give_string(out_json, r.to_json_string())?;
        Ok(SymcartanStatus::Ok)
    })
}

/// Runs the suites of a JSON configuration. The report is stored in `out`
/// whenever the run completes, including when checks fail.
#[no_mangle]
pub unsafe extern "C" fn symcartan_verify(
    config_json: *const c_char,
    out: *mut *mut SymcartanReport,
) -> SymcartanStatus {
    guard(|| {
        check_out(out)?;
        let cfg = SuiteConfig::from_json(text(config_json, "config")?)?;
        let report = run_suite(&cfg, false)?;
        let passed = report.all_passed();
        if !passed {
            set_error(format!("failing checks: {}", report.failing_digests().join(", ")));
        }
        *out = Box::into_raw(Box::new(SymcartanReport(report)));
        if passed {
            Ok(SymcartanStatus::Ok)
        } else {
            Ok(SymcartanStatus::ChecksFailed)
        }
    })
}

/// 1 when every check passed, 0 otherwise or on null.
#[no_mangle]
pub unsafe extern "C" fn symcartan_report_passed(report: *const SymcartanReport) -> i32 {
    report.as_ref().map_or(0, |r| r.0.all_passed() as i32)
}

#[no_mangle]
pub unsafe extern "C" fn symcartan_report_failed_count(report: *const SymcartanReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.summary.failed)
}

#[no_mangle]
pub unsafe extern "C" fn symcartan_report_json(
    report: *const SymcartanReport,
    out_json: *mut *mut c_char,
) -> SymcartanStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| Fail(SymcartanStatus::NullPointer, "report is null".into()))?;
        give_string(out_json, r.0.to_json_string())?;
        Ok(SymcartanStatus::Ok)
    })
}

#[no_mangle]
pub unsafe extern "C" fn symcartan_report_free(report: *mut SymcartanReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Holonomy of a bundled rolling model around a JSON path, as JSON.
#[no_mangle]
pub unsafe extern "C" fn symcartan_holonomy(
    model: *const c_char,
    path_json: *const c_char,
    steps: usize,
    out_json: *mut *mut c_char,
) -> SymcartanStatus {
    guard(|| {
        let model = text(model, "model")?;
        let path: PathSpec = text(path_json, "path")?.parse()?;
        let r = holonomy_of(model, &path, steps)?;
        give_string(out_json, r.to_json_string())?;
        Ok(SymcartanStatus::Ok)
    })
}
