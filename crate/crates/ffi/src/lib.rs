//! C interface to `qlog-core`.
//!
//! Every function returns a [`QlogStatus`]. Results go through out-pointers,
//! variable-length results through opaque handles freed by the matching
//! `*_free` function. On failure the message is kept per thread and can be
//! read with [`qlog_last_error_message`]. Panics never cross the boundary.
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access their name
//! implies: out-pointers writable, handles obtained from this library and
//! not yet freed, `buf` writable for `len` bytes. Null out-pointers and
//! handles are reported as [`QlogStatus::NullPointer`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qlog_core::qlog::{lnq_coefficients, lnq_eval, CoeffList, LnqMethod};
use qlog_core::sumrules::{b_series_coeffs, exp_b_eval_with, sigma, SigmaMethod};
use qlog_core::zeroscape::{collision_point, find_real_zeros, find_turning_points, leading_zeros, positive_real_zeros, CollisionKind, CollisionOutcome, TurningSearch, ZeroRecord};
use qlog_core::{bracket, eval_series, Family, FunctionSpec, QError, QParam};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlogStatus {
    Ok = 0,
    InvalidArgument = 1,
    OutsideConvergence = 2,
    Overflow = 3,
    NoConvergence = 4,
    IndexOutOfRange = 5,
    MethodMismatch = 6,
    RootFinding = 7,
    Certification = 8,
    InsufficientZeros = 9,
    Collision = 10,
    NullPointer = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlogConvention {
    Symmetric = 0,
    Jackson = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlogFamily {
    Exp = 0,
    Cos = 1,
    Sin = 2,
    /// r-th derivative of the exponential, `r` taken from [`QlogSpec::r`].
    ExpDerivative = 3,
    /// r-th integral of the exponential.
    ExpIntegral = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlogSigmaMethod {
    Series = 0,
    Recursive = 1,
    Direct = 2,
    ClosedForm = 3,
    /// Partial sum over located zeros; the count is a separate argument.
    Zeros = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlogLnqMethod {
    Recursive = 0,
    Reversion = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QlogComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for QlogComplex {
    fn from(z: Complex64) -> Self {
        QlogComplex { re: z.re, im: z.im }
    }
}

impl From<QlogComplex> for Complex64 {
    fn from(z: QlogComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// One member of the deformed family.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QlogSpec {
    pub q: f64,
    pub convention: QlogConvention,
    pub family: QlogFamily,
    /// Order for the derivative and integral families, ignored otherwise.
    pub r: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QlogValue {
    pub value: QlogComplex,
    pub error_estimate: f64,
    /// Nonzero when the tail or last-term test certified the value.
    pub certified: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QlogRoot {
    pub location: QlogComplex,
    pub location_error: f64,
    pub residual: f64,
    pub certified: i32,
    /// `f` at the root for turning points, zero for plain zeros.
    pub branch_value: QlogComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QlogCollision {
    /// Zero when the pair stayed real over the sampled range.
    pub found: i32,
    pub q_star: f64,
    pub location: f64,
    /// Width of the final bisection bracket in `q`.
    pub bracket_width: f64,
    /// Range of `q` that was searched.
    pub q_min: f64,
    pub q_max: f64,
}

/// Opaque list of series coefficients.
pub struct QlogCoeffs {
    inner: CoeffList,
}

/// Opaque list of roots.
pub struct QlogRoots {
    inner: Vec<QlogRoot>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &QError) -> QlogStatus {
    match e {
        QError::InvalidArgument(_) => QlogStatus::InvalidArgument,
        QError::Overflow { .. } => QlogStatus::Overflow,
        QError::OutsideConvergence { .. } => QlogStatus::OutsideConvergence,
        QError::NoConvergence { .. } => QlogStatus::NoConvergence,
        QError::IndexOutOfRange(_) => QlogStatus::IndexOutOfRange,
        QError::MethodMismatch { .. } => QlogStatus::MethodMismatch,
        QError::RootFinding(_) => QlogStatus::RootFinding,
        QError::Certification(_) => QlogStatus::Certification,
        QError::InsufficientZeros(_) => QlogStatus::InsufficientZeros,
        QError::Collision(_) => QlogStatus::Collision,
    }
}

enum Failure {
    Core(QError),
    Null(&'static str),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::Core(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> QlogStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            QlogStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer passed as {name}"));
            QlogStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            QlogStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    // SAFETY: the caller promises a valid, writable pointer when non-null.
    unsafe { p.as_mut() }.ok_or(Failure::Null(name))
}

fn qparam(q: f64, convention: QlogConvention) -> Result<QParam, QError> {
    match convention {
        QlogConvention::Symmetric => QParam::symmetric(q),
        QlogConvention::Jackson => QParam::jackson(q),
    }
}

fn spec_of(s: &QlogSpec) -> Result<FunctionSpec, QError> {
    let family = match s.family {
        QlogFamily::Exp => Family::Exp,
        QlogFamily::Cos => Family::Cos,
        QlogFamily::Sin => Family::Sin,
        QlogFamily::ExpDerivative => Family::ExpDerivative(s.r),
        QlogFamily::ExpIntegral => Family::ExpIntegral(s.r),
    };
    Ok(FunctionSpec::new(family, qparam(s.q, s.convention)?))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// zero when the last call succeeded.
#[no_mangle]
pub unsafe extern "C" fn qlog_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: the caller provides `len` writable bytes at `buf`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qlog_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The deformed integer `[n]`.
#[no_mangle]
pub unsafe extern "C" fn qlog_bracket(n: u64, q: f64, convention: QlogConvention, result: *mut f64) -> QlogStatus {
    guard(|| {
        let r = out(result, "result")?;
        *r = bracket(n, qparam(q, convention)?)?;
        Ok(())
    })
}

/// Evaluate the family member at `z` to relative tolerance `tol`.
#[no_mangle]
pub unsafe extern "C" fn qlog_eval(spec: QlogSpec, z: QlogComplex, tol: f64, result: *mut QlogValue) -> QlogStatus {
    guard(|| {
        let r = out(result, "result")?;
        let v = eval_series(spec_of(&spec)?, z.into(), tol)?;
        *r = QlogValue {
            value: v.value.into(),
            error_estimate: v.error_estimate(),
            certified: 1,
        };
        Ok(())
    })
}

/// Zero sum rule of the given index (a power of `z`). `zeros` is used only
/// by [`QlogSigmaMethod::Zeros`].
#[no_mangle]
pub unsafe extern "C" fn qlog_sigma(spec: QlogSpec, index: u32, method: QlogSigmaMethod, zeros: usize, result: *mut QlogValue) -> QlogStatus {
    guard(|| {
        let r = out(result, "result")?;
        let method = match method {
            QlogSigmaMethod::Series => SigmaMethod::Series,
            QlogSigmaMethod::Recursive => SigmaMethod::Recursive,
            QlogSigmaMethod::Direct => SigmaMethod::Direct,
            QlogSigmaMethod::ClosedForm => SigmaMethod::ClosedForm,
            QlogSigmaMethod::Zeros => SigmaMethod::ZeroPartialSum { zeros },
        };
        let s = sigma(spec_of(&spec)?, index, method)?;
        *r = QlogValue {
            value: QlogComplex { re: s.value, im: 0.0 },
            error_estimate: s.error_estimate,
            certified: 1,
        };
        Ok(())
    })
}

fn boxed_coeffs(list: CoeffList, handle: *mut *mut QlogCoeffs) -> Result<(), Failure> {
    let h = out(handle, "handle")?;
    *h = Box::into_raw(Box::new(QlogCoeffs { inner: list }));
    Ok(())
}

/// Coefficients of `ln_q(1+w)` up to degree `n_max`.
#[no_mangle]
pub unsafe extern "C" fn qlog_lnq_coefficients(q: f64, convention: QlogConvention, n_max: usize, method: QlogLnqMethod, handle: *mut *mut QlogCoeffs) -> QlogStatus {
    guard(|| {
        let method = match method {
            QlogLnqMethod::Recursive => LnqMethod::Recursive,
            QlogLnqMethod::Reversion => LnqMethod::Reversion,
        };
        boxed_coeffs(lnq_coefficients(n_max, qparam(q, convention)?, method)?, handle)
    })
}

/// Coefficients of the logarithm series `b(z)` with `f = exp(b)`.
#[no_mangle]
pub unsafe extern "C" fn qlog_b_series(spec: QlogSpec, n_max: usize, handle: *mut *mut QlogCoeffs) -> QlogStatus {
    guard(|| boxed_coeffs(b_series_coeffs(spec_of(&spec)?, n_max)?, handle))
}

#[no_mangle]
pub unsafe extern "C" fn qlog_coeffs_len(handle: *const QlogCoeffs) -> usize {
    // SAFETY: a non-null handle came from this library and is still live.
    unsafe { handle.as_ref() }.map_or(0, |h| h.inner.coeffs.len())
}

/// Coefficient and its rounding error estimate at degree `n`.
#[no_mangle]
pub unsafe extern "C" fn qlog_coeffs_get(handle: *const QlogCoeffs, n: usize, value: *mut f64, error: *mut f64) -> QlogStatus {
    guard(|| {
        // SAFETY: as in `qlog_coeffs_len`.
        let h = unsafe { handle.as_ref() }.ok_or(Failure::Null("handle"))?;
        if n >= h.inner.coeffs.len() {
            return Err(QError::IndexOutOfRange(format!("degree {n} beyond {}", h.inner.degree())).into());
        }
        *out(value, "value")? = h.inner.coeffs[n];
        if let Some(e) = unsafe { error.as_mut() } {
            *e = h.inner.errors[n];
        }
        Ok(())
    })
}

/// Evaluate `ln_q(1+w)` from a coefficient handle produced by
/// [`qlog_lnq_coefficients`], or `exp(b(w))` from one produced by
/// [`qlog_b_series`].
#[no_mangle]
pub unsafe extern "C" fn qlog_coeffs_eval(handle: *const QlogCoeffs, w: QlogComplex, result: *mut QlogValue) -> QlogStatus {
    guard(|| {
        // SAFETY: as in `qlog_coeffs_len`.
        let h = unsafe { handle.as_ref() }.ok_or(Failure::Null("handle"))?;
        let r = out(result, "result")?;
        let v = match h.inner.kind {
            qlog_core::qlog::CoeffKind::BSeries(_) => exp_b_eval_with(&h.inner, w.into())?,
            _ => lnq_eval(w.into(), &h.inner)?,
        };
        *r = QlogValue {
            value: v.value.into(),
            error_estimate: v.last_term,
            certified: v.certified as i32,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qlog_coeffs_free(handle: *mut QlogCoeffs) {
    if !handle.is_null() {
        // SAFETY: the handle was created by `Box::into_raw` here and is freed once.
        drop(unsafe { Box::from_raw(handle) });
    }
}

fn root_of(z: &ZeroRecord, branch: Complex64) -> QlogRoot {
    QlogRoot {
        location: z.location.into(),
        location_error: z.location_error,
        residual: z.residual,
        certified: z.certified as i32,
        branch_value: branch.into(),
    }
}

fn boxed_roots(roots: Vec<QlogRoot>, handle: *mut *mut QlogRoots) -> Result<(), Failure> {
    let h = out(handle, "handle")?;
    *h = Box::into_raw(Box::new(QlogRoots { inner: roots }));
    Ok(())
}

/// The `count` zeros of smallest modulus. Trigonometric members return their
/// positive real zeros instead.
#[no_mangle]
pub unsafe extern "C" fn qlog_zeros(spec: QlogSpec, count: usize, handle: *mut *mut QlogRoots) -> QlogStatus {
    guard(|| {
        let spec = spec_of(&spec)?;
        let zeros = match spec.family {
            Family::Cos | Family::Sin => positive_real_zeros(spec, count)?,
            _ => leading_zeros(spec, count)?,
        };
        boxed_roots(zeros.iter().map(|z| root_of(z, Complex64::new(0.0, 0.0))).collect(), handle)
    })
}

/// Real zeros on `[x_min, x_max]`, at most `max_count` of them.
#[no_mangle]
pub unsafe extern "C" fn qlog_real_zeros(spec: QlogSpec, x_min: f64, x_max: f64, max_count: usize, handle: *mut *mut QlogRoots) -> QlogStatus {
    guard(|| {
        let found = find_real_zeros(spec_of(&spec)?, x_min, x_max, max_count)?;
        boxed_roots(found.zeros.iter().map(|z| root_of(z, Complex64::new(0.0, 0.0))).collect(), handle)
    })
}

/// Turning points (zeros of the derivative) with their branch values,
/// followed from small `q` so complex ones are included.
#[no_mangle]
pub unsafe extern "C" fn qlog_turning_points(spec: QlogSpec, count: usize, handle: *mut *mut QlogRoots) -> QlogStatus {
    guard(|| {
        let tps = find_turning_points(spec_of(&spec)?, &TurningSearch::Continuation, count)?;
        boxed_roots(tps.iter().map(|t| root_of(&t.root, t.branch_value)).collect(), handle)
    })
}

#[no_mangle]
pub unsafe extern "C" fn qlog_roots_len(handle: *const QlogRoots) -> usize {
    // SAFETY: a non-null handle came from this library and is still live.
    unsafe { handle.as_ref() }.map_or(0, |h| h.inner.len())
}

#[no_mangle]
pub unsafe extern "C" fn qlog_roots_get(handle: *const QlogRoots, i: usize, root: *mut QlogRoot) -> QlogStatus {
    guard(|| {
        // SAFETY: as in `qlog_roots_len`.
        let h = unsafe { handle.as_ref() }.ok_or(Failure::Null("handle"))?;
        let r = out(root, "root")?;
        *r = *h
            .inner
            .get(i)
            .ok_or_else(|| QError::IndexOutOfRange(format!("root {i} of {}", h.inner.len())))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn qlog_roots_free(handle: *mut QlogRoots) {
    if !handle.is_null() {
        // SAFETY: the handle was created by `Box::into_raw` here and is freed once.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// First `q` at which pair `pair` (counted from the origin) of zeros
/// (`turning == 0`) or turning points (`turning != 0`) collides.
#[no_mangle]
pub unsafe extern "C" fn qlog_collision(spec: QlogSpec, turning: i32, pair: usize, result: *mut QlogCollision) -> QlogStatus {
    guard(|| {
        let r = out(result, "result")?;
        let kind = if turning != 0 { CollisionKind::TurningPair(pair) } else { CollisionKind::ZeroPair(pair) };
        *r = match collision_point(spec_of(&spec)?, kind)? {
            CollisionOutcome::Collision(c) => QlogCollision {
                found: 1,
                q_star: c.q_star,
                location: c.location,
                bracket_width: c.bracket_width,
                q_min: f64::NAN,
                q_max: f64::NAN,
            },
            CollisionOutcome::NoCollision { q_min, q_max } => QlogCollision {
                found: 0,
                q_star: f64::NAN,
                location: f64::NAN,
                bracket_width: f64::NAN,
                q_min,
                q_max,
            },
        };
        Ok(())
    })
}
