//! C ABI for the rank-certificate library.
//!
//! Conventions:
//! - polynomials are opaque handles created by [`ar_poly_parse`] and
//!   released by [`ar_poly_free`]; handles are immutable and safe to share
//!   across threads;
//! - every fallible function returns an `ArStatus` code and writes its
//!   result through out-pointers, which are only written on `AR_OK`;
//! - strings returned through `char**` are UTF-8, heap-allocated, and must
//!   be released with [`ar_string_free`];
//! - the last error message is thread-local; fetch it with
//!   [`ar_last_error`] right after a failure.
//!
//! The companion header `include/apolar_rank.h` is generated with cbindgen
//! (`cbindgen --config cbindgen.toml --output include/apolar_rank.h`).

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use num_rational::BigRational;

use apolar_rank::apolarity;
use apolar_rank::catalecticant;
use apolar_rank::cli;
use apolar_rank::hierarchy;
use apolar_rank::monomial_decomp::{self, VerifyMode};
use apolar_rank::poly::parse::parse_homogeneous;
use apolar_rank::poly::QPoly;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArStatus {
    /// Success.
    AR_OK = 0,
    /// The input text failed to parse or was not homogeneous.
    AR_PARSE_ERROR = 1,
    /// A precondition on the mathematical input was violated.
    AR_DOMAIN_ERROR = 2,
    /// A rank-hierarchy inequality failed: an internal bug, not bad input.
    AR_INTERNAL_ERROR = 3,
    /// A required pointer argument was null.
    AR_NULL_ARGUMENT = 4,
    /// Text was not valid UTF-8.
    AR_INVALID_UTF8 = 5,
    /// The output buffer was too small.
    AR_BUFFER_TOO_SMALL = 6,
    /// A panic was caught at the boundary.
    AR_PANIC = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

/// Opaque polynomial handle.
pub struct ArPolynomial {
    inner: QPoly,
}

fn guard<F: FnOnce() -> ArStatus>(f: F) -> ArStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("panic at the FFI boundary");
            ArStatus::AR_PANIC
        }
    }
}

/// Copy the last error message of this thread into `buf` (NUL terminated,
/// truncated to `cap`).  Returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (length query).
#[no_mangle]
pub unsafe extern "C" fn ar_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parse a homogeneous polynomial in variables `x0..xn` into a handle.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ar_poly_parse(
    text: *const c_char,
    n: u32,
    out: *mut *mut ArPolynomial,
) -> ArStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("polynomial text is not UTF-8");
            return ArStatus::AR_INVALID_UTF8;
        }
    };
    guard(|| match parse_homogeneous(text, n as usize) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(ArPolynomial { inner: p }));
            ArStatus::AR_OK
        }
        Err(e) => {
            set_error(e.to_string());
            ArStatus::AR_PARSE_ERROR
        }
    })
}

/// Release a polynomial handle.  Null is a no-op.
///
/// # Safety
/// `p` must come from [`ar_poly_parse`] and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn ar_poly_free(p: *mut ArPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Total degree of the polynomial.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ar_poly_degree(p: *const ArPolynomial, out: *mut u32) -> ArStatus {
    if p.is_null() || out.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    *out = (*p).inner.degree();
    ArStatus::AR_OK
}

/// Number of monomials with nonzero coefficient.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ar_poly_term_count(p: *const ArPolynomial, out: *mut usize) -> ArStatus {
    if p.is_null() || out.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    *out = (*p).inner.num_terms();
    ArStatus::AR_OK
}

/// Hilbert function of `S/(f-perp)` in degrees `0..=d`, written into
/// `out_buf`; `out_len` receives `d+1`.
///
/// # Safety
/// `out_buf` must hold `cap` writable entries; all pointers valid.
#[no_mangle]
pub unsafe extern "C" fn ar_hilbert(
    p: *const ArPolynomial,
    out_buf: *mut u32,
    cap: usize,
    out_len: *mut usize,
) -> ArStatus {
    if p.is_null() || out_len.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    guard(|| match apolarity::hilbert_function(&(*p).inner) {
        Ok(h) => {
            *out_len = h.values.len();
            if h.values.len() > cap {
                set_error("buffer too small for the Hilbert vector");
                return ArStatus::AR_BUFFER_TOO_SMALL;
            }
            if !out_buf.is_null() {
                for (i, v) in h.values.iter().enumerate() {
                    *out_buf.add(i) = *v as u32;
                }
            }
            ArStatus::AR_OK
        }
        Err(e) => {
            set_error(e.to_string());
            ArStatus::AR_DOMAIN_ERROR
        }
    })
}

/// Exact catalecticant rank.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ar_catalecticant_rank(
    p: *const ArPolynomial,
    out: *mut u32,
) -> ArStatus {
    if p.is_null() || out.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    guard(|| match catalecticant::catalecticant_rank(&(*p).inner) {
        Ok(r) => {
            *out = r as u32;
            ArStatus::AR_OK
        }
        Err(e) => {
            set_error(e.to_string());
            ArStatus::AR_DOMAIN_ERROR
        }
    })
}

/// Exact Waring rank of a binary form.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ar_sylvester_rank(p: *const ArPolynomial, out: *mut u32) -> ArStatus {
    if p.is_null() || out.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    guard(|| match hierarchy::sylvester_binary_rank(&(*p).inner) {
        Ok(r) => {
            *out = r as u32;
            ArStatus::AR_OK
        }
        Err(e) => {
            set_error(e.to_string());
            ArStatus::AR_DOMAIN_ERROR
        }
    })
}

/// Full rank report as a JSON document (schema `apolar-rank/1`); release
/// the string with [`ar_string_free`].
///
/// # Safety
/// `p` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ar_rank_report_json(
    p: *const ArPolynomial,
    r_max: u32,
    seed: u64,
    out_json: *mut *mut c_char,
) -> ArStatus {
    if p.is_null() || out_json.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    guard(|| match hierarchy::rank_report(&(*p).inner, r_max as usize, seed) {
        Ok(rep) => {
            let json = cli::report_json_string(&rep);
            *out_json = CString::new(json).expect("no NUL in JSON").into_raw();
            ArStatus::AR_OK
        }
        Err(hierarchy::HierarchyError::Inconsistency(m)) => {
            set_error(m);
            ArStatus::AR_INTERNAL_ERROR
        }
        Err(e) => {
            set_error(e.to_string());
            ArStatus::AR_DOMAIN_ERROR
        }
    })
}

/// Exact Waring decomposition of the monomial `x^alpha` at
/// `eps = eps_num / eps_den`, as a verified JSON document.
///
/// # Safety
/// `alpha` must hold `alpha_len` entries; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ar_monomial_decomposition_json(
    alpha: *const u32,
    alpha_len: usize,
    eps_num: i64,
    eps_den: i64,
    out_json: *mut *mut c_char,
) -> ArStatus {
    if alpha.is_null() || out_json.is_null() {
        set_error("null argument");
        return ArStatus::AR_NULL_ARGUMENT;
    }
    if eps_den == 0 {
        set_error("zero denominator");
        return ArStatus::AR_DOMAIN_ERROR;
    }
    let alpha = std::slice::from_raw_parts(alpha, alpha_len).to_vec();
    guard(|| {
        let eps = BigRational::new(BigInt::from(eps_num), BigInt::from(eps_den));
        match monomial_decomp::monomial_waring(&alpha, &eps) {
            Ok(dec) => {
                let report = monomial_decomp::verify(&dec, VerifyMode::Exact, 1e-9);
                let json = cli::decomposition_json_string(&dec, &report);
                *out_json = CString::new(json).expect("no NUL in JSON").into_raw();
                ArStatus::AR_OK
            }
            Err(e) => {
                set_error(e.to_string());
                ArStatus::AR_DOMAIN_ERROR
            }
        }
    })
}

/// Release a string returned by this library.  Null is a no-op.
///
/// # Safety
/// `s` must come from a function of this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ar_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    fn parse_ok(text: &str, n: u32) -> *mut ArPolynomial {
        let c = CString::new(text).unwrap();
        let mut out = ptr::null_mut();
        let st = unsafe { ar_poly_parse(c.as_ptr(), n, &mut out) };
        assert_eq!(st, ArStatus::AR_OK);
        out
    }

    #[test]
    fn parse_and_hilbert() {
        let p = parse_ok("x0*x1^2*x2^2", 2);
        let mut buf = [0u32; 16];
        let mut len = 0usize;
        let st = unsafe { ar_hilbert(p, buf.as_mut_ptr(), buf.len(), &mut len) };
        assert_eq!(st, ArStatus::AR_OK);
        assert_eq!(&buf[..len], &[1, 3, 5, 5, 3, 1]);
        let mut rank = 0u32;
        assert_eq!(unsafe { ar_catalecticant_rank(p, &mut rank) }, ArStatus::AR_OK);
        assert_eq!(rank, 5);
        unsafe { ar_poly_free(p) };
    }

    #[test]
    fn parse_error_reports_message() {
        let c = CString::new("x0 + @").unwrap();
        let mut out = ptr::null_mut();
        let st = unsafe { ar_poly_parse(c.as_ptr(), 1, &mut out) };
        assert_eq!(st, ArStatus::AR_PARSE_ERROR);
        let mut buf = [0i8; 256];
        let len = unsafe { ar_last_error(buf.as_mut_ptr(), buf.len()) };
        assert!(len > 0);
    }

    #[test]
    fn report_json_round_trips() {
        let p = parse_ok("x0^2*x1", 1);
        let mut s: *mut c_char = ptr::null_mut();
        let st = unsafe { ar_rank_report_json(p, 8, 0, &mut s) };
        assert_eq!(st, ArStatus::AR_OK);
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
        assert!(text.contains("\"schema\": \"apolar-rank/1\""));
        assert!(text.contains("\"r_h\": 2"));
        unsafe { ar_string_free(s) };
        unsafe { ar_poly_free(p) };
    }

    #[test]
    fn sylvester_through_ffi() {
        let p = parse_ok("x0*x1^2", 1);
        let mut rank = 0u32;
        assert_eq!(unsafe { ar_sylvester_rank(p, &mut rank) }, ArStatus::AR_OK);
        assert_eq!(rank, 3);
        unsafe { ar_poly_free(p) };
    }

    #[test]
    fn monomial_decomposition_json_is_verified() {
        let alpha = [1u32, 2, 2];
        let mut s: *mut c_char = ptr::null_mut();
        let st = unsafe {
            ar_monomial_decomposition_json(alpha.as_ptr(), alpha.len(), 1, 2, &mut s)
        };
        assert_eq!(st, ArStatus::AR_OK);
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap();
        assert!(text.contains("\"verified\": true"));
        unsafe { ar_string_free(s) };
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut out = ptr::null_mut();
        assert_eq!(
            unsafe { ar_poly_parse(ptr::null(), 1, &mut out) },
            ArStatus::AR_NULL_ARGUMENT
        );
        unsafe { ar_poly_free(ptr::null_mut()) };
        unsafe { ar_string_free(ptr::null_mut()) };
    }
}
