use relim_core::certificate::{build_certificate, trace_hash, verify_certificate, Certificate, VerifyError};
use relim_core::engine::{iterate_speedup, MergePolicy, SpeedupOptions};
use relim_core::family::{certify_lemma, make_pi, param_after, param_step, FamilyParams};
use relim_core::hash::sha256_json;
use relim_core::problem::zero_round_solvable;
use relim_core::sim::brute_force_zero_round;
use relim_core::Side;

fn params(delta: u32, x: u32, y: u32) -> FamilyParams {
    FamilyParams::new(delta, x, y).unwrap()
}

#[test]
fn label_counts_of_two_steps() {
    for delta in [2, 3] {
        let out = iterate_speedup(&make_pi(params(delta, 0, 0)), 2, &MergePolicy::None, &SpeedupOptions::default()).unwrap();
        let counts: Vec<usize> = out.problems.iter().map(|p| p.alphabet().len()).collect();
        assert_eq!(counts, vec![4, 6], "delta {delta}");
    }
}

#[test]
fn seven_one_one_relaxes_with_the_expected_map() {
    let r = certify_lemma(params(7, 1, 1), &SpeedupOptions::default()).unwrap();
    let map = r.mapping.expect("mapping found");
    for (from, to) in [("<M,X>", "M"), ("<O,X>", "P"), ("<O,P,X>", "O"), ("<M,O,P,X>", "X")] {
        assert_eq!(map.get(from).map(String::as_str), Some(to), "{from}");
    }
    assert_eq!(r.next, params(7, 2, 2));
}

#[test]
fn small_lemma_cases() {
    for (delta, x, y) in [(2, 0, 0), (3, 0, 0), (3, 1, 0), (4, 1, 1), (5, 2, 0), (5, 0, 4)] {
        let r = certify_lemma(params(delta, x, y), &SpeedupOptions::default()).unwrap();
        assert!(r.success(), "({delta},{x},{y}): {}", r.message);
    }
}

#[test]
fn base_case_members_are_unsolvable() {
    for delta in 2..=8u32 {
        for x in 0..=delta - 2 {
            let p = make_pi(params(delta, x, delta - 2 - x));
            let report = zero_round_solvable(&p, Side::Active);
            assert!(!report.solvable, "{p:?}");
            assert!(!report.refutations.is_empty());
        }
    }
}

#[test]
fn zero_round_agrees_with_brute_force_on_the_family() {
    for delta in 1..=5u32 {
        for x in 0..=delta {
            for y in 0..=delta - x {
                let p = make_pi(params(delta, x, y));
                assert_eq!(
                    zero_round_solvable(&p, Side::Active).solvable,
                    brute_force_zero_round(&p).unwrap(),
                    "({delta},{x},{y})"
                );
            }
        }
    }
}

#[test]
fn parameter_closed_form() {
    let start = params(1_000_000, 3, 5);
    let mut cur = start;
    for t in 1..=100u64 {
        cur = param_step(cur).0;
        let (x, y) = param_after(start, t);
        assert_eq!((x, y), (cur.x as u64, cur.y as u64));
        // y' = y + T(x + (T-1)/2), kept integral by doubling
        assert_eq!(2 * y, 2 * 5 + t * (2 * 3 + t - 1));
    }
}

fn cert(delta: u32, max_t: u32) -> Certificate {
    build_certificate(delta, max_t, &SpeedupOptions::default()).unwrap()
}

#[test]
fn certificates_verify() {
    for (delta, max_t, rounds) in [(2, 3, Some(0)), (3, 3, Some(1)), (4, 3, Some(1)), (5, 2, Some(2)), (6, 3, Some(2))] {
        let c = cert(delta, max_t);
        assert_eq!(c.rounds_exceeded(), rounds, "delta {delta}");
        let claim = verify_certificate(&c.to_json()).unwrap();
        assert_eq!(claim.rounds_exceeded, rounds);
    }
}

#[test]
fn delta_one_proves_nothing() {
    let c = cert(1, 2);
    assert_eq!(c.rounds_exceeded(), None);
    assert!(c.body.steps.is_empty());
    assert_eq!(verify_certificate(&c.to_json()).unwrap().rounds_exceeded, None);
}

fn resign(mut c: Certificate, edit: impl FnOnce(&mut Certificate)) -> String {
    edit(&mut c);
    c.digest = sha256_json(&c.body);
    c.to_json()
}

#[test]
fn forged_certificates_are_rejected() {
    let c = cert(5, 2);

    let bad = resign(c.clone(), |c| c.body.final_check.zero_round_solvable = true);
    assert!(matches!(verify_certificate(&bad), Err(VerifyError::Final(_))));

    let bad = resign(c.clone(), |c| c.body.steps[1].target_params.y += 1);
    assert!(matches!(verify_certificate(&bad), Err(VerifyError::Step { index: 2, .. })));

    let bad = resign(c.clone(), |c| c.body.steps[0].upgrades.pop().map(|_| ()).unwrap());
    assert!(matches!(verify_certificate(&bad), Err(VerifyError::Step { index: 1, .. })));

    // dropping a maximal family breaks completeness even with a fresh trace hash
    let bad = resign(c.clone(), |c| {
        let step = &mut c.body.steps[0];
        let text = step.speedup.problem.clone();
        let white = text.lines().find(|l| l.starts_with("white:")).unwrap();
        let kept = white.rsplit_once(" | ").unwrap().0;
        step.speedup.problem = text.replacen(white, kept, 1);
        step.speedup.trace_hash = trace_hash(&step.problem, &step.speedup.problem, &step.speedup.dictionary);
    });
    assert!(matches!(verify_certificate(&bad), Err(VerifyError::Step { index: 1, .. })), "{:?}", verify_certificate(&bad));

    let bad = resign(c.clone(), |c| c.body.steps.pop().map(|_| ()).unwrap());
    assert!(verify_certificate(&bad).is_err());

    let mut text = c.to_json();
    text = text.replacen("\"rounds_exceeded\": 2", "\"rounds_exceeded\": 3", 1);
    assert!(matches!(verify_certificate(&text), Err(VerifyError::Digest { .. })));

    assert!(matches!(verify_certificate("{"), Err(VerifyError::Malformed(_))));
}
