use num_complex::Complex64;
use proptest::prelude::*;

use qlog_core::combinatorics::{binomial, compositions};
use qlog_core::qlog::{lnq_coefficients, LnqMethod};
use qlog_core::sumrules::{sigma, SigmaMethod};
use qlog_core::{bracket, Family, FunctionSpec, QParam, Series};

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Exp),
        Just(Family::Cos),
        Just(Family::Sin),
        (1u32..=3).prop_map(Family::ExpDerivative),
        (1u32..=3).prop_map(Family::ExpIntegral),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compositions_are_counted_by_binomials(n in 1u32..=16, l in 1u32..=16) {
        prop_assume!(l <= n);
        let mut count = 0u64;
        for c in compositions(n, l) {
            prop_assert_eq!(c.parts.len(), l as usize);
            prop_assert!(c.parts.iter().all(|&p| p >= 1));
            prop_assert_eq!(c.parts.iter().sum::<u32>(), n);
            count += 1;
        }
        prop_assert_eq!(count as f64, binomial(n as u64 - 1, l as u64 - 1));
    }

    #[test]
    fn symmetric_bracket_is_invariant_under_inversion(n in 0u64..60, q in 0.05f64..1.0) {
        let a = bracket(n, QParam::symmetric(q).unwrap()).unwrap();
        let b = bracket(n, QParam::symmetric(1.0 / q).unwrap()).unwrap();
        prop_assert!(rel(a, b) < 1e-13);
    }

    #[test]
    fn brackets_approach_integers_as_q_tends_to_one(n in 1u64..40, eps in 1e-9f64..1e-6) {
        for qp in [QParam::symmetric(1.0 - eps).unwrap(), QParam::jackson(1.0 + eps).unwrap()] {
            let b = bracket(n, qp).unwrap();
            prop_assert!(rel(b, n as f64) < 1e-4 * n as f64);
        }
    }

    #[test]
    fn series_respects_schwarz_reflection(f in family(), q in 0.1f64..=1.0, re in -6.0f64..6.0, im in -6.0f64..6.0) {
        let series = Series::new(FunctionSpec::new(f, QParam::symmetric(q).unwrap()));
        let z = Complex64::new(re, im);
        let a = series.eval(z, 1e-16).unwrap();
        let b = series.eval(z.conj(), 1e-16).unwrap();
        let tol = a.error_estimate() + b.error_estimate();
        prop_assert!((a.value.conj() - b.value).norm() <= tol, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn truncation_error_is_within_the_reported_bound(q in 0.1f64..=1.0, r in 0.0f64..8.0, t in 0.0f64..6.3, tol in 1e-12f64..1e-3) {
        let series = Series::new(FunctionSpec::exp(QParam::symmetric(q).unwrap()));
        let z = Complex64::from_polar(r, t);
        let rough = series.eval(z, tol).unwrap();
        let fine = series.eval(z, 1e-17).unwrap();
        let err = (rough.value - fine.value).norm();
        prop_assert!(err <= rough.error_estimate() + fine.error_estimate(), "error {err:e} tail {:e}", rough.tail_bound);
    }

    #[test]
    fn lnq_methods_agree(q in 0.1f64..=1.0, jackson in any::<bool>()) {
        let qp = if jackson { QParam::jackson(1.0 + q).unwrap() } else { QParam::symmetric(q).unwrap() };
        let a = lnq_coefficients(14, qp, LnqMethod::Recursive).unwrap();
        let b = lnq_coefficients(14, qp, LnqMethod::Reversion).unwrap();
        for n in 1..=14 {
            prop_assert!((a.get(n) - b.get(n)).abs() <= 1e-12 * a.get(n).abs().max(1e-300), "n = {n}: {} vs {}", a.get(n), b.get(n));
        }
    }

    #[test]
    fn sum_rule_methods_agree(f in family(), q in 0.15f64..=1.0, m in 1u32..=6) {
        let spec = FunctionSpec::new(f, QParam::symmetric(q).unwrap());
        let n = match f {
            Family::Cos => 2 * m,
            Family::Sin => 2 * m + 1,
            _ => m,
        };
        let a = sigma(spec, n, SigmaMethod::Series).unwrap().value;
        let b = sigma(spec, n, SigmaMethod::Recursive).unwrap().value;
        let c = sigma(spec, n, SigmaMethod::Direct).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-12 || (a - b).abs() < 1e-15);
        prop_assert!(rel(a, c) <= 1e-12 || (a - c).abs() < 1e-15);
    }
}
