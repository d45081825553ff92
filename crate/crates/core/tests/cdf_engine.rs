mod common;

use proptest::prelude::*;
use rcf_core::cdf::transfer;
use rcf_core::{stieltjes_log_integrals, IfsParams, IteratedCdf, LogIntegrand};

#[test]
fn pruned_eval_matches_unpruned_recursion() {
    for &alpha in &[0.2, 0.35, 0.5, 0.8, 1.7] {
        let m = common::fixed_point(alpha);
        for n in 0..=10 {
            let f = IteratedCdf::new(alpha, n).unwrap();
            for i in 0..=200 {
                let s = m * i as f64 / 200.0;
                let want = common::operator_recursion_cdf(alpha, n, s);
                assert!((f.eval(s) - want).abs() < 1e-12, "alpha={alpha} n={n} s={s}");
            }
        }
    }
}

#[test]
fn transfer_of_previous_iterate_is_next_iterate() {
    let alpha = 0.3;
    let params = IfsParams::new(alpha).unwrap();
    let f3 = IteratedCdf::new(alpha, 3).unwrap();
    let f4 = IteratedCdf::new(alpha, 4).unwrap();
    for i in 0..=100 {
        let s = params.m_alpha * i as f64 / 100.0;
        assert!((transfer(&params, |t| f3.eval(t), s) - f4.eval(s)).abs() < 1e-12);
    }
}

#[test]
fn boundary_values() {
    for &alpha in &[0.2, 1.0] {
        let m = common::fixed_point(alpha);
        let f = IteratedCdf::new(alpha, 8).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(m), 1.0);
        assert_eq!(f.eval(m + 1.0), 1.0);
    }
}

#[test]
fn depth_zero_integrals_match_antiderivatives() {
    for &alpha in &[1.0 / 6.0, 0.25, 0.5, 2.0] {
        let f = IteratedCdf::new(alpha, 0).unwrap();
        let [lo, up] = stieltjes_log_integrals(&f, [LogIntegrand::Lower, LogIntegrand::Upper]).unwrap();
        assert!((lo - common::lower_integral_depth0(alpha)).abs() < 1e-13);
        assert!((up - common::upper_integral_depth0(alpha)).abs() < 1e-13);
    }
}

#[test]
fn eps_integrand_matches_quadrature() {
    let alpha = 0.3;
    let eps = 0.4;
    let f = IteratedCdf::new(alpha, 4).unwrap();
    let [got] = stieltjes_log_integrals(&f, [LogIntegrand::Eps(eps)]).unwrap();
    let m = common::fixed_point(alpha);
    let g = |s: f64| 0.5 * ((1.0 + s - eps) * (1.0 + s + alpha - eps)).ln() - (eps * s + 1.0 - eps).ln();
    let dg = |s: f64| 0.5 / (1.0 + s - eps) + 0.5 / (1.0 + s + alpha - eps) - eps / (eps * s + 1.0 - eps);
    let want = g(m) - common::adaptive_simpson(&|s| f.eval(s) * dg(s), 0.0, m, 1e-12);
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterates_decrease_when_start_check_holds(alpha in 1.0f64 / 6.0..3.0, u in 0.0f64..1.0, n in 0usize..12) {
        let m = common::fixed_point(alpha);
        let s = u * m;
        let a = IteratedCdf::new(alpha, n).unwrap().eval(s);
        let b = IteratedCdf::new(alpha, n + 1).unwrap().eval(s);
        prop_assert!(b <= a + 1e-13);
    }

    #[test]
    fn iterates_are_cdfs(alpha in 0.05f64..3.0, u in 0.0f64..1.0, v in 0.0f64..1.0, n in 0usize..10) {
        let m = common::fixed_point(alpha);
        let f = IteratedCdf::new(alpha, n).unwrap();
        let (s, t) = (u.min(v) * m, u.max(v) * m);
        let (fs, ft) = (f.eval(s), f.eval(t));
        prop_assert!((0.0..=1.0).contains(&fs));
        prop_assert!(fs <= ft + 1e-15);
    }
}
