//! Cross-checks between the certificate routes: the escalation test and the
//! spectral search must never contradict each other, and the order-1
//! no-interval witness is always also a spectral witness.

use proptest::prelude::*;

use cantordiff::decision::{decide_order1, spectral_certificate, Certificate, Verdict};
use cantordiff::spectrum::{
    correlations, expectation_matrix, gamma_at, pf_eigenvalue, word_matrix, CantorSpec,
};

fn arb_spec(max_base: usize) -> impl Strategy<Value = Vec<f64>> {
    (2usize..=max_base).prop_flat_map(|m| {
        prop::collection::vec(
            prop_oneof![
                3 => 0.0f64..=1.0,
                1 => Just(0.0f64),
                1 => Just(1.0f64),
            ],
            m,
        )
    })
}

proptest! {
    // If every order-n correlation exceeds 1 then no length-n word has both
    // column sums below 1, so an interval certificate can never coexist
    // with a spectral witness of that length.
    #[test]
    fn interval_and_spectral_certificates_exclude(p in arb_spec(3)) {
        let spec = CantorSpec::new(p).unwrap();
        let m = spec.base() as u64;
        for order in 1u32..=3 {
            let total = m.pow(order);
            let all_above = (0..total)
                .all(|k| gamma_at(&spec, order, k).unwrap() > 1.0);
            if all_above {
                for k in 0..total {
                    let word: Vec<u32> =
                        cantordiff::spectrum::digits_of_index(k, spec.base(), order);
                    let (l, r) = word_matrix(&spec, &word).unwrap().column_sums();
                    prop_assert!(
                        !(l < 1.0 && r < 1.0),
                        "word {word:?} contradicts the all-above certificate"
                    );
                }
            }
        }
    }

    // An order-1 no-interval witness k makes the length-1 word (k) a
    // spectral witness: both column sums of its matrix are below 1, hence
    // so is the eigenvalue.
    #[test]
    fn order1_witness_subsumed_by_spectral(p in arb_spec(6)) {
        let spec = CantorSpec::new(p).unwrap();
        let decision = decide_order1(&correlations(&spec));
        if let Certificate::ConsecutiveGammaBelowOne { column, .. } = &decision.certificate {
            let mat = expectation_matrix(&spec, *column as u32).unwrap();
            let lam = pf_eigenvalue(&mat).unwrap();
            prop_assert!(lam < 1.0, "witness digit {column} has eigenvalue {lam}");
            if spec.is_supercritical() {
                let witness = spectral_certificate(&spec, 1).unwrap();
                prop_assert!(witness.is_some());
            }
        }
    }

    // If all order-1 values exceed 1 then so do all order-2 values:
    // interval certificates survive order doubling.
    #[test]
    fn escalation_monotone_order1_to_order2(p in arb_spec(4)) {
        let spec = CantorSpec::new(p).unwrap();
        let gamma = correlations(&spec);
        if gamma.min() > 1.0 {
            let m = spec.base() as u64;
            for k in 0..m * m {
                prop_assert!(gamma_at(&spec, 2, k).unwrap() > 1.0);
            }
        }
    }
}

#[test]
fn probabilistic_and_deterministic_engines_agree() {
    // On 0-1 vectors both engines answer the same question; wherever the
    // correlation machinery produces a definitive verdict it must match
    // the attractor verdict.
    use cantordiff::decision::decide_escalating;
    use cantordiff::deterministic::{decide_deterministic, DeterministicVerdict};
    for m in 2u32..=6 {
        for mask in 0u32..(1 << m) {
            if mask.count_ones() < 2 {
                continue;
            }
            let p: Vec<f64> = (0..m)
                .map(|i| if mask & (1 << i) != 0 { 1.0 } else { 0.0 })
                .collect();
            let spec = CantorSpec::new(p.clone()).unwrap();
            let det = decide_deterministic(&spec).unwrap().verdict;
            let esc = decide_escalating(&spec, 3).unwrap().verdict;
            match esc {
                Verdict::IntervalAs => {
                    assert_eq!(det, DeterministicVerdict::Interval, "p = {p:?}")
                }
                Verdict::NoIntervalAs => {
                    assert_eq!(det, DeterministicVerdict::NoInterval, "p = {p:?}")
                }
                Verdict::Inconclusive => {}
            }
            if let Some(w) = spectral_certificate(&spec, 3).unwrap() {
                assert_eq!(
                    det,
                    DeterministicVerdict::NoInterval,
                    "p = {p:?}: spectral witness {w:?} against Interval verdict"
                );
            }
        }
    }
}

#[test]
fn verdicts_consistent_on_first_family_grid() {
    // Escalation and spectral search must agree in direction across the
    // parameter range of the (1, 0, 1, rho) family.
    for i in 1..=40 {
        let rho = i as f64 / 41.0;
        let spec = CantorSpec::new(vec![1.0, 0.0, 1.0, rho]).unwrap();
        let escalated = cantordiff::decision::decide_escalating(&spec, 3).unwrap();
        let spectral = spectral_certificate(&spec, 3).unwrap();
        if escalated.verdict == Verdict::IntervalAs {
            assert!(
                spectral.is_none(),
                "rho = {rho}: interval certificate with spectral witness {spectral:?}"
            );
        }
        if let Some(w) = &spectral {
            assert_ne!(
                escalated.verdict,
                Verdict::IntervalAs,
                "rho = {rho}: spectral witness {w:?} against interval verdict"
            );
        }
    }
}
