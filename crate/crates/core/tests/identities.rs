//! Algebraic identities of the correlation and matrix machinery, quantified
//! over random specs.

use proptest::prelude::*;

use cantordiff::spectrum::{
    correlations, expectation_matrix, gamma_at, higher_order, pf_eigenvalue, word_matrix,
    CantorSpec, ExpectationMatrix,
};

fn arb_probs(m: usize) -> impl Strategy<Value = Vec<f64>> {
    // Mix plain uniforms with hard zeros and ones; degenerate entries are
    // where index arithmetic usually breaks.
    prop::collection::vec(
        prop_oneof![
            3 => 0.0f64..=1.0,
            1 => Just(0.0f64),
            1 => Just(1.0f64),
        ],
        m,
    )
}

fn arb_spec() -> impl Strategy<Value = CantorSpec> {
    (2usize..=6)
        .prop_flat_map(|m| (arb_probs(m), prop::option::of(arb_probs(m))))
        .prop_map(|(p, q)| CantorSpec::with_cross(p, q).unwrap())
}

proptest! {
    // Column sums of the level-1 matrix at digit k are (gamma_{k+1}, gamma_k).
    #[test]
    fn eq36_column_sums(spec in arb_spec()) {
        let gamma = correlations(&spec);
        for k in 0..spec.base() {
            let mat = expectation_matrix(&spec, k).unwrap();
            let (l_sum, r_sum) = mat.column_sums();
            prop_assert!((l_sum - gamma.at(k as usize + 1)).abs() < 1e-12);
            prop_assert!((r_sum - gamma.at(k as usize)).abs() < 1e-12);
        }
    }

    // Word products are multiplicative over concatenation.
    #[test]
    fn eq33_product_law(
        spec in arb_spec(),
        split in 0usize..=6,
        raw in prop::collection::vec(0u32..6, 0..=6),
    ) {
        let word: Vec<u32> = raw.iter().map(|d| d % spec.base()).collect();
        let cut = split.min(word.len());
        let (u, v) = word.split_at(cut);
        let whole = word_matrix(&spec, &word).unwrap();
        let product = word_matrix(&spec, u).unwrap().mul(&word_matrix(&spec, v).unwrap());
        for (a, b) in [
            (whole.ll, product.ll),
            (whole.lr, product.lr),
            (whole.rl, product.rl),
            (whole.rr, product.rr),
        ] {
            prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    // gamma_at equals the correlation of the materialised lift.
    #[test]
    fn lift_consistency(
        m in 2u32..=4,
        order in 1u32..=3,
        raw in prop::collection::vec(0.0f64..=1.0, 4),
    ) {
        let p: Vec<f64> = raw.into_iter().take(m as usize).collect();
        prop_assume!(p.len() == m as usize);
        let spec = CantorSpec::new(p).unwrap();
        let lifted = higher_order(&spec, order).unwrap();
        let gamma = correlations(&lifted);
        for k in 0..lifted.base() as u64 {
            let direct = gamma_at(&spec, order, k).unwrap();
            prop_assert!((direct - gamma.at(k as usize)).abs() < 1e-9);
        }
    }

    // Swapping the roles of the two vectors mirrors the column index and
    // interchanges the two triangle types.
    #[test]
    fn mirror_symmetry_cross(spec in arb_spec()) {
        let m = spec.base();
        let swapped = CantorSpec::with_cross(
            spec.q().to_vec(),
            Some(spec.p().to_vec()),
        ).unwrap();
        for k in 0..m {
            let direct = expectation_matrix(&spec, k).unwrap().type_swapped();
            let mirrored = expectation_matrix(&swapped, m - 1 - k).unwrap();
            prop_assert!((direct.ll - mirrored.ll).abs() < 1e-12);
            prop_assert!((direct.lr - mirrored.lr).abs() < 1e-12);
            prop_assert!((direct.rl - mirrored.rl).abs() < 1e-12);
            prop_assert!((direct.rr - mirrored.rr).abs() < 1e-12);
        }
    }

    // For palindromic vectors the matrix at the mirrored digit is the
    // matrix at the digit with both type orders reversed.
    #[test]
    fn mirror_symmetry_palindromic(
        m in 2usize..=6,
        raw in prop::collection::vec(0.0f64..=1.0, 6),
    ) {
        let mut p: Vec<f64> = raw.into_iter().take(m).collect();
        prop_assume!(p.len() == m);
        for i in 0..m / 2 {
            p[m - 1 - i] = p[i];
        }
        let spec = CantorSpec::new(p).unwrap();
        for k in 0..m as u32 {
            let direct = expectation_matrix(&spec, m as u32 - 1 - k).unwrap();
            let swapped = expectation_matrix(&spec, k).unwrap().type_swapped();
            prop_assert!((direct.ll - swapped.ll).abs() < 1e-12);
            prop_assert!((direct.lr - swapped.lr).abs() < 1e-12);
            prop_assert!((direct.rl - swapped.rl).abs() < 1e-12);
            prop_assert!((direct.rr - swapped.rr).abs() < 1e-12);
        }
    }

    // The dominant eigenvalue is at least every diagonal entry.
    #[test]
    fn eigenvalue_dominates_diagonal(
        a in 0.0f64..10.0, b in 0.0f64..10.0, c in 0.0f64..10.0, d in 0.0f64..10.0,
    ) {
        let m = ExpectationMatrix::new(a, b, c, d);
        let lam = pf_eigenvalue(&m).unwrap();
        prop_assert!(lam >= a.max(d) - 1e-12);
    }

    // A product of two matrices whose column sums are all below 1
    // contracts: its eigenvalue is below 1.
    #[test]
    fn eigenvalue_of_contracting_product(
        a in 0.0f64..0.5, b in 0.0f64..0.5, c in 0.0f64..0.5, d in 0.0f64..0.5,
        e in 0.0f64..0.5, f in 0.0f64..0.5, g in 0.0f64..0.5, h in 0.0f64..0.5,
    ) {
        let m1 = ExpectationMatrix::new(a, b, c, d);
        let m2 = ExpectationMatrix::new(e, f, g, h);
        let lam = pf_eigenvalue(&m1.mul(&m2)).unwrap();
        prop_assert!(lam < 1.0);
    }

    // Verdict payloads survive JSON round trips bit-exactly.
    #[test]
    fn decision_json_round_trip(spec in arb_spec()) {
        let d = cantordiff::decision::decide_order1(&correlations(&spec));
        let json = serde_json::to_string(&d).unwrap();
        let back: cantordiff::decision::Decision = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, d);
    }
}

proptest! {
    // In base 3 the lag-1 and lag-2 correlations coincide and never exceed
    // the lag-0 value, which is why order-1 decisions are complete there.
    #[test]
    fn base_three_correlation_order(raw in prop::collection::vec(0.0f64..=1.0, 3)) {
        let spec = CantorSpec::new(raw).unwrap();
        let g = correlations(&spec);
        prop_assert!((g.at(1) - g.at(2)).abs() < 1e-12);
        prop_assert!(g.at(0) >= g.at(1) - 1e-12);
        let d = cantordiff::decision::decide_order1(&g);
        use cantordiff::decision::Verdict;
        if g.at(1) > 1.0 {
            prop_assert_eq!(d.verdict, Verdict::IntervalAs);
        } else if g.at(1) < 1.0 {
            prop_assert_eq!(d.verdict, Verdict::NoIntervalAs);
        }
    }
}

#[test]
fn deterministic_histograms_equal_matrix_entries() {
    // For 0-1 vectors the expectation matrices count triangles exactly:
    // at every level, the sampled histogram of the (deterministic) survivor
    // configuration must reproduce the word-matrix entries, with the
    // negative side reading the L row and the positive side the R row.
    use cantordiff::simulate::{column_histogram, sample, SampleSide};
    use cantordiff::spectrum::{digits_of_index, ColumnSide};
    for p in [
        vec![1.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0, 1.0],
        vec![1.0, 1.0],
    ] {
        let spec = CantorSpec::new(p).unwrap();
        let m = spec.base();
        let s1 = sample(&spec, SampleSide::First, 3, 1, 0).unwrap();
        let s2 = sample(&spec, SampleSide::Second, 3, 1, 0).unwrap();
        for level in 1..=3u32 {
            let hist = column_histogram(&s1, &s2, level).unwrap();
            for index in 0..(m as u64).pow(level) {
                let word = digits_of_index(index, m, level);
                let mat = word_matrix(&spec, &word).unwrap();
                let (neg_l, neg_r) = hist.counts(ColumnSide::Negative, index);
                let (pos_l, pos_r) = hist.counts(ColumnSide::Positive, index);
                assert_eq!(neg_l as f64, mat.ll, "neg L at {word:?}");
                assert_eq!(neg_r as f64, mat.lr, "neg R at {word:?}");
                assert_eq!(pos_l as f64, mat.rl, "pos L at {word:?}");
                assert_eq!(pos_r as f64, mat.rr, "pos R at {word:?}");
            }
        }
    }
}

#[test]
fn spec_json_form() {
    let spec: CantorSpec =
        serde_json::from_str(r#"{"M": 4, "p": [1,0,1,0.3], "q": null}"#).unwrap();
    assert_eq!(spec.base(), 4);
    assert_eq!(spec.p(), &[1.0, 0.0, 1.0, 0.3]);
    assert!(spec.q_explicit().is_none());
    // M must match the vector length.
    assert!(serde_json::from_str::<CantorSpec>(r#"{"M": 3, "p": [1,0,1,0.3]}"#).is_err());
    let round: CantorSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(round, spec);
}
