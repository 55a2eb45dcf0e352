//! C ABI over `selfsim`.
//!
//! Systems live behind the opaque `selfsim_ifs_t` handle. Every fallible
//! call returns one of the `SELFSIM_*` codes; on failure the message is
//! available from `selfsim_last_error` on the same thread. Strings handed
//! out by the library are released with `selfsim_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use selfsim::cli::{parse_system, run_args, system_json};
use selfsim::ifs::dimension::moran_dimension;
use selfsim::numerics::rational::{from_f64, to_f64, two_pow};
use selfsim::numerics::Rational;
use selfsim::Ifs;

pub const SELFSIM_OK: i32 = 0;
/// The computation finished without a result (no witness, inconclusive).
pub const SELFSIM_NO_RESULT: i32 = 1;
pub const SELFSIM_INVALID_INPUT: i32 = 2;
pub const SELFSIM_NULL_POINTER: i32 = 3;
pub const SELFSIM_INVALID_UTF8: i32 = 4;
pub const SELFSIM_PANIC: i32 = 5;

/// Opaque handle to an iterated function system.
pub struct SelfsimIfs(Ifs);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> i32) -> i32 {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            SELFSIM_PANIC
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, i32> {
    if p.is_null() {
        set_error("null string argument");
        return Err(SELFSIM_NULL_POINTER);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        SELFSIM_INVALID_UTF8
    })
}

unsafe fn write_string(out: *mut *mut c_char, text: String) {
    *out = CString::new(text.replace('\0', " ")).unwrap_or_default().into_raw();
}

/// Parses a JSON system definition (`maps` or `digits` form).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_ifs_from_json(json: *const c_char, out: *mut *mut SelfsimIfs) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SELFSIM_NULL_POINTER;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match parse_system(text) {
            Ok(ifs) => {
                *out = Box::into_raw(Box::new(SelfsimIfs(ifs)));
                SELFSIM_OK
            }
            Err(e) => {
                set_error(e.to_string());
                SELFSIM_INVALID_INPUT
            }
        }
    })
}

/// # Safety
/// `ifs` must come from `selfsim_ifs_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn selfsim_ifs_free(ifs: *mut SelfsimIfs) {
    if !ifs.is_null() {
        drop(Box::from_raw(ifs));
    }
}

/// Number of maps, 0 for a null handle.
///
/// # Safety
/// `ifs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn selfsim_ifs_len(ifs: *const SelfsimIfs) -> usize {
    ifs.as_ref().map_or(0, |h| h.0.len())
}

/// Canonical `maps` JSON of the system.
///
/// # Safety
/// `ifs` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_ifs_to_json(ifs: *const SelfsimIfs, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let (Some(h), false) = (ifs.as_ref(), out.is_null()) else {
            set_error("null argument");
            return SELFSIM_NULL_POINTER;
        };
        write_string(out, system_json(&h.0).to_string());
        SELFSIM_OK
    })
}

fn f64_below(q: &Rational) -> f64 {
    let x = to_f64(q);
    if &from_f64(x) > q {
        step(x, false)
    } else {
        x
    }
}

fn f64_above(q: &Rational) -> f64 {
    let x = to_f64(q);
    if &from_f64(x) < q {
        step(x, true)
    } else {
        x
    }
}

fn step(x: f64, up: bool) -> f64 {
    if x == 0.0 {
        let tiny = f64::from_bits(1);
        return if up { tiny } else { -tiny };
    }
    let bits = x.to_bits();
    let away = (x > 0.0) == up;
    f64::from_bits(if away { bits + 1 } else { bits - 1 })
}

/// Moran dimension enclosure of width at most `2^-precision_bits`, rounded
/// outward to doubles.
///
/// # Safety
/// `ifs` must be a live handle; `lo` and `hi` must be writable.
#[no_mangle]
pub unsafe extern "C" fn selfsim_dimension(ifs: *const SelfsimIfs, precision_bits: u32, lo: *mut f64, hi: *mut f64) -> i32 {
    guard(|| {
        let (Some(h), false, false) = (ifs.as_ref(), lo.is_null(), hi.is_null()) else {
            set_error("null argument");
            return SELFSIM_NULL_POINTER;
        };
        if !(8..=4096).contains(&precision_bits) {
            set_error("precision_bits must lie in 8..=4096");
            return SELFSIM_INVALID_INPUT;
        }
        let width = two_pow(-(precision_bits as i64));
        let d = moran_dimension(&h.0, &width);
        *lo = f64_below(d.lo());
        *hi = f64_above(d.hi());
        SELFSIM_OK
    })
}

/// Runs one command-line command against `ifs` (which may be null for
/// commands that need no system). `args_json` is a JSON array of strings,
/// for example `["pfunction", "--samples", "8"]`. `*out` receives the
/// command output, or the error document when the input is rejected.
/// Returns `SELFSIM_OK`, `SELFSIM_NO_RESULT` or `SELFSIM_INVALID_INPUT`.
///
/// # Safety
/// `args_json` must be a NUL-terminated string; `out` must be writable;
/// `ifs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn selfsim_run(ifs: *const SelfsimIfs, args_json: *const c_char, out: *mut *mut c_char) -> i32 {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return SELFSIM_NULL_POINTER;
        }
        *out = ptr::null_mut();
        let text = match read_str(args_json) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let args: Vec<String> = match serde_json::from_str(text) {
            Ok(a) => a,
            Err(e) => {
                set_error(format!("arguments must be a JSON array of strings: {e}"));
                return SELFSIM_INVALID_INPUT;
            }
        };
        let argv = std::iter::once("selfsim".to_string()).chain(args);
        let report = run_args(argv, ifs.as_ref().map(|h| &h.0));
        let code = match report.code {
            0 => SELFSIM_OK,
            1 => SELFSIM_NO_RESULT,
            _ => SELFSIM_INVALID_INPUT,
        };
        if !report.stderr.is_empty() {
            set_error(report.stderr.trim_end());
        }
        write_string(out, if report.stdout.is_empty() { report.stderr } else { report.stdout });
        code
    })
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn selfsim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn selfsim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn selfsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
