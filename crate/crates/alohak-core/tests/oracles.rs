//! Cross-validation of the closed forms against their independent
//! computation paths: the inclusion-exclusion expansions, the exhaustive
//! enumeration, frozen independently-derived values, and the finite-model
//! limit toward the Poisson model.

use alohak_core::{
    exact_v_enumerate, optimal_k_finite, optimal_k_infinite, v_finite, v_finite_history,
    v_finite_incl_excl, v_finite_noiseless, v_infinite, v_infinite_incl_excl, w_finite, w_infinite,
    FiniteModel, PoissonModel, Variant,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn fm(n: u32, q: f64, eps: f64, k: u32) -> FiniteModel {
    FiniteModel::new(n, q, eps, k).unwrap()
}

fn pm(lam: f64, eps: f64, k: u32) -> PoissonModel {
    PoissonModel::new(lam, eps, k).unwrap()
}

/// Values fixed ahead of time with an independent implementation of the
/// exhaustive path-sum (and re-derived here by `exact_v_enumerate`).
#[test]
fn frozen_enumeration_values() {
    let m = fm(3, 0.1, 0.2, 2);
    let exact = exact_v_enumerate(&m, Variant::Preemptive).unwrap();
    assert!(rel(exact, 0.6829172904198346).abs() < 1e-12, "{exact}");
    assert!(rel(v_finite(&m), exact) < 1e-10);

    let exact_h = exact_v_enumerate(&m, Variant::History).unwrap();
    assert!(rel(exact_h, 0.6936328240661153) < 1e-12, "{exact_h}");
    assert!(rel(v_finite_history(&m), exact_h) < 1e-10);

    let m2 = fm(2, 0.1, 0.2, 2);
    assert!(rel(v_finite(&m2), 0.8337757090909093) < 1e-12);
    assert!(rel(v_finite_history(&m2), 0.8426356363636365) < 1e-12);
    assert!(rel(v_finite_noiseless(&fm(3, 0.1, 0.0, 2)), 0.7379769421487601) < 1e-12);
}

#[test]
fn frozen_w_values() {
    // W = N·q/(1+q)·V at the rate-matched two-user point.
    let q = 0.02 / (2.0 - 0.02);
    let w = w_finite(&fm(2, q, 0.4, 7));
    assert!(rel(w.value, 0.01939672657820978) < 1e-12, "{}", w.value);
    assert!(!w.exceeds_one);

    // Consistency: W/V is exactly the arrival rate, for any K.
    let m = fm(10, 0.002, 0.4, 7);
    let ratio = w_finite(&m).value / v_finite(&m);
    assert!((ratio - m.arrival_rate()).abs() < 1e-15);
}

#[test]
fn exhaustive_grid_preemptive_and_history() {
    // Every instance the enumeration accepts, against both closed forms.
    for n in 1..=3_u32 {
        for k in 0..=3_u32 {
            for &q in &[0.05, 0.2, 0.5] {
                for &eps in &[0.0, 0.3, 0.7] {
                    let m = fm(n, q, eps, k);
                    let exact = exact_v_enumerate(&m, Variant::Preemptive).unwrap();
                    assert!(
                        rel(v_finite(&m), exact) < 1e-10,
                        "preemptive N={n} K={k} q={q} eps={eps}: {} vs {exact}",
                        v_finite(&m)
                    );
                    let exact_h = exact_v_enumerate(&m, Variant::History).unwrap();
                    assert!(
                        rel(v_finite_history(&m), exact_h) < 1e-10,
                        "history N={n} K={k} q={q} eps={eps}: {} vs {exact_h}",
                        v_finite_history(&m)
                    );
                }
            }
        }
    }
}

#[test]
fn incl_excl_identity_grid() {
    for &n in &[1_u32, 2, 5, 20] {
        for &q in &[0.001, 0.01, 0.1] {
            for &eps in &[0.0, 0.3, 0.9] {
                for &k in &[0_u32, 1, 3, 10] {
                    let m = fm(n, q, eps, k);
                    let gap = rel(v_finite(&m), v_finite_incl_excl(&m));
                    assert!(gap < 1e-10, "N={n} q={q} eps={eps} K={k}: gap {gap:e}");
                }
            }
        }
    }
    for &lam in &[0.005, 0.02, 0.1, 0.5] {
        for &eps in &[0.0, 0.3, 0.9] {
            for &k in &[0_u32, 1, 3, 10] {
                let m = pm(lam, eps, k);
                let gap = rel(v_infinite(&m), v_infinite_incl_excl(&m));
                assert!(gap < 1e-10, "lam={lam} eps={eps} K={k}: gap {gap:e}");
            }
        }
    }
}

#[test]
fn finite_converges_to_poisson_limit() {
    // q chosen so N·q/(1+q) = lambda exactly.
    let n = 1000_u32;
    for &lam in &[0.005, 0.02, 0.1] {
        for &eps in &[0.0, 0.4] {
            for &k in &[0_u32, 7] {
                let q = lam / (n as f64 - lam);
                let vf = v_finite(&fm(n, q, eps, k));
                let vi = v_infinite(&pm(lam, eps, k));
                assert!(
                    (vf - vi).abs() <= 1e-3,
                    "lam={lam} eps={eps} K={k}: |{vf} - {vi}|"
                );
            }
        }
    }
}

#[test]
fn frozen_infinite_values() {
    assert!(rel(v_infinite(&pm(0.02, 0.4, 0)), 0.5881192039840532) < 1e-12);
    assert!(rel(v_infinite(&pm(0.02, 0.4, 7)), 0.9464221886041554) < 1e-12);
    assert!(rel(v_infinite(&pm(0.005, 0.3, 0)), 0.6965087354348775) < 1e-12);
    assert!(rel(v_infinite(&pm(0.005, 0.3, 7)), 0.9901175257349153) < 1e-12);
    assert!(rel(w_infinite(&pm(0.005, 0.3, 0)), 0.003482543677174387) < 1e-12);
    // Classic single-shot ALOHA.
    assert!(rel(v_infinite(&pm(0.5, 0.0, 0)), (-0.5_f64).exp()) < 1e-14);
}

#[test]
fn noiseless_argmax_is_zero() {
    // For N > 1 (and any lambda) the noiseless delivery probability only
    // loses from retransmissions.
    for &(n, q) in &[(2_u32, 0.01), (5, 0.1), (50, 0.002)] {
        let mut prev = v_finite_noiseless(&fm(n, q, 0.0, 0));
        for k in 1..=30 {
            let cur = v_finite_noiseless(&fm(n, q, 0.0, k));
            assert!(
                cur <= prev + 1e-15,
                "N={n} q={q} K={k} rose: {prev} -> {cur}"
            );
            prev = cur;
        }
        assert_eq!(optimal_k_finite(n, q, 0.0).unwrap(), 0);
    }
    for &lam in &[0.02, 0.3, 0.75] {
        assert_eq!(optimal_k_infinite(lam, 0.0).unwrap(), 0);
        let mut prev = v_infinite(&pm(lam, 0.0, 0));
        for k in 1..=30 {
            let cur = v_infinite(&pm(lam, 0.0, k));
            assert!(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

proptest! {
    #[test]
    fn probabilities_stay_in_range(
        n in 1_u32..30,
        q in 1e-4_f64..0.95,
        eps in 0.0_f64..0.995,
        k in 0_u32..60,
    ) {
        let m = fm(n, q, eps, k);
        for v in [v_finite(&m), v_finite_history(&m), v_finite_noiseless(&m), v_finite_incl_excl(&m)] {
            prop_assert!(v.is_finite());
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "out of range: {v}");
        }
    }

    #[test]
    fn infinite_probability_in_range(
        lam in 1e-4_f64..3.0,
        eps in 0.0_f64..0.995,
        k in 0_u32..60,
    ) {
        let m = pm(lam, eps, k);
        let v = v_infinite(&m);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "out of range: {v}");
    }

    #[test]
    fn dual_route_agreement_sampled(
        n in 1_u32..25,
        q in 1e-4_f64..0.9,
        eps in 0.0_f64..0.99,
        k in 0_u32..40,
    ) {
        // Wider domain than the pinned grid, slightly looser bound.
        let m = fm(n, q, eps, k);
        prop_assert!(rel(v_finite(&m), v_finite_incl_excl(&m)) < 1e-9);
    }

    #[test]
    fn history_dominates_preemptive(
        n in 1_u32..20,
        q in 1e-4_f64..0.9,
        eps in 0.0_f64..0.995,
        k in 0_u32..60,
    ) {
        // Identical interference, strictly larger delivery window.
        let m = fm(n, q, eps, k);
        prop_assert!(v_finite_history(&m) >= v_finite(&m) - 1e-13);
    }

    #[test]
    fn k0_window_cannot_be_preempted(
        n in 1_u32..20,
        q in 1e-4_f64..0.9,
        eps in 0.0_f64..0.995,
    ) {
        let m = fm(n, q, eps, 0);
        prop_assert!(rel(v_finite(&m), v_finite_history(&m)) < 1e-12);
    }

    #[test]
    fn eps_zero_degenerates_to_noiseless(
        n in 1_u32..30,
        q in 1e-4_f64..0.95,
        k in 0_u32..60,
    ) {
        let m = fm(n, q, 0.0, k);
        prop_assert!(rel(v_finite(&m), v_finite_noiseless(&m)) < 1e-12);
    }
}
