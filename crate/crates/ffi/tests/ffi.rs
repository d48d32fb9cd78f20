use std::ffi::{c_char, CStr};
use std::ptr;

use qlog_ffi::*;

fn sym(q: f64) -> QlogSpec {
    QlogSpec {
        q,
        convention: QlogConvention::Symmetric,
        family: QlogFamily::Exp,
        r: 0,
    }
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { qlog_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn bracket_and_eval_at_classical_point() {
    let mut b = 0.0;
    assert_eq!(unsafe { qlog_bracket(5, 1.0, QlogConvention::Symmetric, &mut b) }, QlogStatus::Ok);
    assert_eq!(b, 5.0);

    let mut v = QlogValue {
        value: QlogComplex { re: 0.0, im: 0.0 },
        error_estimate: 0.0,
        certified: 0,
    };
    let z = QlogComplex { re: 1.0, im: 0.0 };
    assert_eq!(unsafe { qlog_eval(sym(1.0), z, 1e-15, &mut v) }, QlogStatus::Ok);
    assert!((v.value.re - std::f64::consts::E).abs() < 1e-14);
    assert_eq!(unsafe { qlog_last_error_message(ptr::null_mut(), 0) }, 0);
}

#[test]
fn errors_map_to_status_codes() {
    let mut b = 0.0;
    assert_eq!(unsafe { qlog_bracket(3, -1.0, QlogConvention::Symmetric, &mut b) }, QlogStatus::InvalidArgument);
    assert!(last_error().contains("invalid argument"));

    assert_eq!(unsafe { qlog_bracket(3, 0.5, QlogConvention::Symmetric, ptr::null_mut()) }, QlogStatus::NullPointer);
    assert!(last_error().contains("result"));

    let jackson = QlogSpec {
        convention: QlogConvention::Jackson,
        ..sym(0.5)
    };
    let mut v = QlogValue {
        value: QlogComplex { re: 0.0, im: 0.0 },
        error_estimate: 0.0,
        certified: 0,
    };
    let z = QlogComplex { re: 3.0, im: 0.0 };
    assert_eq!(unsafe { qlog_eval(jackson, z, 1e-12, &mut v) }, QlogStatus::OutsideConvergence);
}

#[test]
fn truncated_error_message_is_terminated() {
    let mut b = 0.0;
    unsafe { qlog_bracket(3, f64::NAN, QlogConvention::Symmetric, &mut b) };
    let mut buf = [1 as c_char; 8];
    let n = unsafe { qlog_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 7);
    assert_eq!(buf[7], 0);
}

#[test]
fn sigma_two_of_the_exponential() {
    let mut v = QlogValue {
        value: QlogComplex { re: 0.0, im: 0.0 },
        error_estimate: 0.0,
        certified: 0,
    };
    assert_eq!(unsafe { qlog_sigma(sym(0.5), 2, QlogSigmaMethod::Recursive, 0, &mut v) }, QlogStatus::Ok);
    let mut b2 = 0.0;
    unsafe { qlog_bracket(2, 0.5, QlogConvention::Symmetric, &mut b2) };
    // sigma_2 = 1 - 2/[2]
    assert!((v.value.re - (1.0 - 2.0 / b2)).abs() < 1e-13, "{v:?}");
}

#[test]
fn lnq_coefficients_handle_round_trip() {
    let mut h: *mut QlogCoeffs = ptr::null_mut();
    let status = unsafe { qlog_lnq_coefficients(1.0, QlogConvention::Symmetric, 10, QlogLnqMethod::Recursive, &mut h) };
    assert_eq!(status, QlogStatus::Ok);
    assert_eq!(unsafe { qlog_coeffs_len(h) }, 11);
    let mut c = 0.0;
    assert_eq!(unsafe { qlog_coeffs_get(h, 3, &mut c, ptr::null_mut()) }, QlogStatus::Ok);
    assert!((c - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(unsafe { qlog_coeffs_get(h, 11, &mut c, ptr::null_mut()) }, QlogStatus::IndexOutOfRange);

    let mut v = QlogValue {
        value: QlogComplex { re: 0.0, im: 0.0 },
        error_estimate: 0.0,
        certified: 0,
    };
    let w = QlogComplex { re: 0.01, im: 0.0 };
    assert_eq!(unsafe { qlog_coeffs_eval(h, w, &mut v) }, QlogStatus::Ok);
    assert!((v.value.re - 0.01f64.ln_1p()).abs() < 1e-15);
    unsafe { qlog_coeffs_free(h) };
    unsafe { qlog_coeffs_free(ptr::null_mut()) };
}

#[test]
fn b_series_reproduces_the_function() {
    let mut h: *mut QlogCoeffs = ptr::null_mut();
    assert_eq!(unsafe { qlog_b_series(sym(0.5), 40, &mut h) }, QlogStatus::Ok);
    let z = QlogComplex { re: 0.3, im: 0.1 };
    let mut from_b = QlogValue {
        value: z,
        error_estimate: 0.0,
        certified: 0,
    };
    let mut direct = from_b;
    assert_eq!(unsafe { qlog_coeffs_eval(h, z, &mut from_b) }, QlogStatus::Ok);
    assert_eq!(unsafe { qlog_eval(sym(0.5), z, 1e-15, &mut direct) }, QlogStatus::Ok);
    assert!((from_b.value.re - direct.value.re).abs() < 1e-12);
    assert!((from_b.value.im - direct.value.im).abs() < 1e-12);
    unsafe { qlog_coeffs_free(h) };
}

#[test]
fn jackson_zeros_through_roots_handle() {
    let q = 2.0;
    let spec = QlogSpec {
        convention: QlogConvention::Jackson,
        ..sym(q)
    };
    let mut h: *mut QlogRoots = ptr::null_mut();
    assert_eq!(unsafe { qlog_zeros(spec, 4, &mut h) }, QlogStatus::Ok);
    assert_eq!(unsafe { qlog_roots_len(h) }, 4);
    for i in 0..4 {
        let mut r = QlogRoot {
            location: QlogComplex { re: 0.0, im: 0.0 },
            location_error: 0.0,
            residual: 0.0,
            certified: 0,
            branch_value: QlogComplex { re: 0.0, im: 0.0 },
        };
        assert_eq!(unsafe { qlog_roots_get(h, i, &mut r) }, QlogStatus::Ok);
        let exact = q.powi(i as i32 + 1) / (1.0 - q);
        assert!((r.location.re - exact).abs() < 1e-10 * exact.abs(), "{r:?}");
        assert_eq!(r.certified, 1);
    }
    let mut r = std::mem::MaybeUninit::<QlogRoot>::uninit();
    assert_eq!(unsafe { qlog_roots_get(h, 4, r.as_mut_ptr()) }, QlogStatus::IndexOutOfRange);
    unsafe { qlog_roots_free(h) };
}

#[test]
fn collision_of_the_first_turning_pair() {
    let mut c = std::mem::MaybeUninit::<QlogCollision>::uninit();
    assert_eq!(unsafe { qlog_collision(sym(0.5), 1, 1, c.as_mut_ptr()) }, QlogStatus::Ok);
    let c = unsafe { c.assume_init() };
    assert_eq!(c.found, 1);
    assert!((c.q_star - 0.25).abs() < 0.01);
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(qlog_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qlog.h")).unwrap();
    for name in [
        "qlog_bracket",
        "qlog_eval",
        "qlog_sigma",
        "qlog_lnq_coefficients",
        "qlog_b_series",
        "qlog_coeffs_eval",
        "qlog_coeffs_free",
        "qlog_zeros",
        "qlog_real_zeros",
        "qlog_turning_points",
        "qlog_roots_free",
        "qlog_collision",
        "qlog_last_error_message",
        "typedef struct QlogCoeffs QlogCoeffs",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
