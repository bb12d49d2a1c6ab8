use proptest::prelude::*;
use relim_core::bounds::{
    amplified_error, base_threshold, compose_amplified, failure_vs_n, id_count_bound, intermediate_inequality,
    iterated_error, multi_round_threshold, Flag,
};
use relim_core::{ErrorBound32, ErrorBound64};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[test]
fn amplification_matches_plain_arithmetic() {
    for delta in 2..=8u32 {
        for k in 1..=64 {
            let p = 2f64.powi(-k);
            let plain = 5.0 * delta as f64 * p.powf(1.0 / (delta as f64 + 1.0));
            let q = amplified_error(&ErrorBound64::from_value(p), delta);
            assert!(rel_close(q.value(), plain, 1e-9), "delta={delta} k={k}");
        }
    }
}

#[test]
fn composition_stays_below_the_closed_form() {
    for delta in 2..=8u32 {
        for t in 1..=5u32 {
            for k in 0..=64 {
                let p = ErrorBound64::from_log2(-(k as f64), "input");
                let composed = compose_amplified(&p, delta, t);
                let closed = iterated_error(&p, delta, t);
                assert!(composed.log2 <= closed.log2 + 1e-9 * closed.log2.abs().max(1.0), "delta={delta} t={t} k={k}");
            }
        }
    }
}

#[test]
fn closed_form_base_case() {
    let p = ErrorBound64::from_log2(-30.0, "input");
    let r = iterated_error(&p, 4, 0);
    assert!(rel_close(r.log2, 2.0 * 20f64.log2() - 30.0, 1e-12));
    let one = iterated_error(&ErrorBound64::from_value(1.0), 4, 3);
    assert!(rel_close(one.value(), 400.0, 1e-12));
    assert!(one.flags.contains(&Flag::NotAProbability));
}

#[test]
fn proof_chain_holds_on_the_grid() {
    for delta in 8..=16u32 {
        for t in 0..=2u32 {
            let m = multi_round_threshold::<f64>(delta, t);
            assert!(m.chain_holds, "delta={delta} t={t}");
            assert_eq!(m.chain_holds_exact, Some(true), "delta={delta} t={t}");
        }
    }
}

#[test]
fn threshold_examples() {
    assert_eq!(base_threshold::<f64>(10).log2, -10.0 * 10f64.log2());
    let m = multi_round_threshold::<f64>(8, 1);
    assert!(m.threshold.flags.contains(&Flag::RoundsAboveHypothesis));
}

#[test]
fn intermediate_step_fails_on_small_squares() {
    // the comparison is only asymptotic; at these sizes it goes the other way
    for delta in [16u32, 25, 36] {
        let r = intermediate_inequality::<f64>(delta, 0);
        assert!(!r.holds, "delta={delta}");
    }
}

#[test]
fn failure_grows_with_exponent() {
    assert!(!failure_vs_n::<f64>(3, 1, 1 << 40).holds);
    assert!(failure_vs_n::<f64>(3, 0, 1 << 40).holds);
    // delta^(2T+2) = 4 here, so the left side is 2^-4
    let f = failure_vs_n::<f64>(2, 0, 2);
    assert_eq!((f.threshold_log2, f.inverse_n_log2, f.holds), (-4.0, -1.0, false));
}

#[test]
fn neighborhoods_are_smaller_below_delta_rounds() {
    for delta in 2..=12u32 {
        for t in 0..delta {
            assert!(id_count_bound::<f64>(delta, t).neighborhood_smaller);
        }
    }
}

#[test]
fn single_precision_alias() {
    let p = ErrorBound32::from_log2(-100.0, "input");
    let q = amplified_error(&p, 3);
    assert!((q.log2 - (15f32.log2() - 25.0)).abs() < 1e-5);
}

proptest! {
    #[test]
    fn amplification_is_monotone(delta in 2u32..20, a in -2000.0f64..0.0, b in -2000.0f64..0.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let qa = amplified_error(&ErrorBound64::from_log2(lo, "input"), delta);
        let qb = amplified_error(&ErrorBound64::from_log2(hi, "input"), delta);
        prop_assert!(qa.log2 <= qb.log2);
    }

    #[test]
    fn thresholds_decrease(delta in 2u32..40, t in 0u32..3) {
        prop_assert!(base_threshold::<f64>(delta + 1).log2 < base_threshold::<f64>(delta).log2);
        let m = multi_round_threshold::<f64>(delta, t).threshold.log2;
        prop_assert!(multi_round_threshold::<f64>(delta + 1, t).threshold.log2 < m);
        prop_assert!(multi_round_threshold::<f64>(delta, t + 1).threshold.log2 < m);
    }

    #[test]
    fn iterated_matches_plain_arithmetic(delta in 2u32..9, t in 0u32..4, k in 1i32..60) {
        let p = 2f64.powi(-k);
        let plain = (5.0 * delta as f64).powi(2) * p.powf(1.0 / (delta as f64 + 1.0).powi(t as i32));
        let r = iterated_error(&ErrorBound64::from_value(p), delta, t);
        prop_assert!(rel_close(r.value(), plain, 1e-9));
    }
}
