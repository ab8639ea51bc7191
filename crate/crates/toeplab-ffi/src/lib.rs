//! C interface to toeplab.
//!
//! Every function returns a `ToeplabStatus`. On failure the message is
//! available from `toeplab_last_error` on the same thread until the next
//! call. Symbols are opaque handles owned by the caller and released with
//! `toeplab_symbol_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use toeplab::asympt::bt_predict;
use toeplab::exactdet::{toeplitz_det, DetOptions};
use toeplab::ising::{correlation, CorrelationKind, IsingParams, Route};
use toeplab::symbols::{builtin, parse_symbol_text, Params};
use toeplab::{CircleSymbol, Error, LogDet, Precision};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToeplabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    Panic = 4,
}

/// det = exp(log_modulus + i phase), or 0 when exact_zero is nonzero.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct ToeplabLogDet {
    pub log_modulus: f64,
    pub phase: f64,
    pub exact_zero: i32,
}

/// Opaque symbol handle.
pub struct ToeplabSymbol(CircleSymbol);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ToeplabStatus {
    set_error(&e.to_string());
    if e.is_input() {
        ToeplabStatus::InvalidInput
    } else {
        ToeplabStatus::Numerical
    }
}

fn guard(f: impl FnOnce() -> Result<(), ToeplabStatus>) -> ToeplabStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ToeplabStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            ToeplabStatus::Panic
        }
    }
}

fn null(what: &str) -> ToeplabStatus {
    set_error(&format!("{what} is null"));
    ToeplabStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, ToeplabStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        ToeplabStatus::InvalidInput
    })
}

fn out_logdet(l: LogDet) -> ToeplabLogDet {
    ToeplabLogDet { log_modulus: l.log_modulus, phase: l.phase, exact_zero: l.exact_zero as i32 }
}

/// Message for the last failed call on this thread (empty after success).
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn toeplab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a named builtin symbol. `keys`, `re` and `im` hold `count`
/// parameters (complex values as re + i im).
///
/// # Safety
/// The arrays must hold `count` valid entries and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_symbol_builtin(
    name: *const c_char,
    keys: *const *const c_char,
    re: *const f64,
    im: *const f64,
    count: usize,
    out: *mut *mut ToeplabSymbol,
) -> ToeplabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = str_arg(name, "name")?;
        let mut p = Params::new();
        if count > 0 {
            if keys.is_null() || re.is_null() || im.is_null() {
                return Err(null("parameter array"));
            }
            for i in 0..count {
                let k = str_arg(*keys.add(i), "parameter key")?;
                p.insert(k.to_string(), Complex64::new(*re.add(i), *im.add(i)));
            }
        }
        let s = builtin(name, &p).map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(ToeplabSymbol(s)));
        Ok(())
    })
}

/// Parses a key=value symbol description.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_symbol_parse(text: *const c_char, out: *mut *mut ToeplabSymbol) -> ToeplabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = parse_symbol_text(str_arg(text, "text")?).map_err(|e| status_of(&e))?;
        *out = Box::into_raw(Box::new(ToeplabSymbol(s)));
        Ok(())
    })
}

/// Releases a symbol; null is ignored.
///
/// # Safety
/// `sym` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn toeplab_symbol_free(sym: *mut ToeplabSymbol) {
    if !sym.is_null() {
        drop(Box::from_raw(sym));
    }
}

/// Fourier coefficient phi_k.
///
/// # Safety
/// `sym` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_symbol_coeff(
    sym: *const ToeplabSymbol,
    k: i64,
    re: *mut f64,
    im: *mut f64,
) -> ToeplabStatus {
    guard(|| {
        if sym.is_null() || re.is_null() || im.is_null() {
            return Err(null("argument"));
        }
        let c = (*sym).0.fourier_coeffs(k, k).map_err(|e| status_of(&e))?[0];
        *re = c.re;
        *im = c.im;
        Ok(())
    })
}

/// Exact D_n. `extended` nonzero selects double-double arithmetic.
///
/// # Safety
/// `sym` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_det(
    sym: *const ToeplabSymbol,
    n: usize,
    extended: i32,
    out: *mut ToeplabLogDet,
) -> ToeplabStatus {
    guard(|| {
        if sym.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let precision = if extended != 0 { Precision::Extended } else { Precision::Double };
        let d = toeplitz_det(&(*sym).0, n, &DetOptions { precision }).map_err(|e| status_of(&e))?;
        *out = out_logdet(d);
        Ok(())
    })
}

/// Large-n prediction for D_n, summed over all minimising representations.
///
/// # Safety
/// `sym` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_predict(sym: *const ToeplabSymbol, n: usize, out: *mut ToeplabLogDet) -> ToeplabStatus {
    guard(|| {
        if sym.is_null() || out.is_null() {
            return Err(null("argument"));
        }
        let p = bt_predict(&(*sym).0).map_err(|e| status_of(&e))?;
        *out = out_logdet(p.evaluate(n).map_err(|e| status_of(&e))?);
        Ok(())
    })
}

/// Ising spin-spin correlation at distance n for equal couplings with
/// Onsager modulus `k_ons`; `diagonal` nonzero selects the diagonal.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_ising_correlation(
    k_ons: f64,
    diagonal: i32,
    n: usize,
    out: *mut f64,
) -> ToeplabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = IsingParams::symmetric_with_k(k_ons).map_err(|e| status_of(&e))?;
        let kind = if diagonal != 0 { CorrelationKind::Diag } else { CorrelationKind::Row };
        *out = correlation(&p, kind, n, Route::Toeplitz).map_err(|e| status_of(&e))?.value;
        Ok(())
    })
}

/// Sine-kernel gap probability on an interval of half-length s
/// (`nodes` = 0 picks the default).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplab_sine_gap(s: f64, nodes: usize, out: *mut ToeplabLogDet) -> ToeplabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = if nodes == 0 { toeplab::scaling::default_gap_nodes(s) } else { nodes };
        let g = toeplab::scaling::sine_gap(s, m).map_err(|e| status_of(&e))?;
        *out = out_logdet(g.p_s);
        Ok(())
    })
}
