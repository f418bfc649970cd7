//! Structural properties of the reduction semigroup and occupancy
//! cross-checks of the deterministic verdicts.

use proptest::prelude::*;

use cantordiff::deterministic::{
    attractor, decide_deterministic, empty_column_depth, g_step, reduce, selfcheck,
    DeterministicVerdict, MatrixSet,
};
use cantordiff::spectrum::CantorSpec;

fn int_mul(a: &[[u64; 2]; 2], b: &[[u64; 2]; 2]) -> [[u64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

proptest! {
    // Reduction is a homomorphism: reducing a product equals the boolean
    // product of the reductions.
    #[test]
    fn reduction_homomorphism(
        a in prop::array::uniform4(0u64..5),
        b in prop::array::uniform4(0u64..5),
    ) {
        let ma = [[a[0], a[1]], [a[2], a[3]]];
        let mb = [[b[0], b[1]], [b[2], b[3]]];
        prop_assert_eq!(
            reduce(&int_mul(&ma, &mb)),
            reduce(&ma).bool_mul(&reduce(&mb))
        );
    }

    // The set map is monotone with respect to inclusion.
    #[test]
    fn g_step_monotone(mask_c in any::<u16>(), extra in any::<u16>()) {
        let c = MatrixSet::from_mask(mask_c);
        let d = MatrixSet::from_mask(mask_c | extra);
        prop_assert!(g_step(c).is_subset_of(&g_step(d)));
    }

    // The orbit report always describes a genuine cycle.
    #[test]
    fn attractor_report_is_a_cycle(mask in any::<u16>()) {
        let report = attractor(MatrixSet::from_mask(mask));
        let cycle = report.cycle_states();
        prop_assert_eq!(cycle.len(), report.period as usize);
        for (i, &s) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            prop_assert_eq!(g_step(s), next);
        }
    }
}

#[test]
fn interval_verdicts_have_no_empty_columns_deep() {
    // Occupancy scanned two levels past the claimed bound.
    for p in [vec![1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0, 0.0, 1.0]] {
        let spec = CantorSpec::new(p).unwrap();
        let d = decide_deterministic(&spec).unwrap();
        assert_eq!(d.verdict, DeterministicVerdict::Interval);
        assert!(empty_column_depth(&spec, 5).unwrap().is_none());
    }
}

#[test]
fn no_interval_verdict_matches_gap_structure() {
    // Base-4 digits {0, 3}: differences at every level avoid a whole band
    // of columns, and the attractor sees it within level 3.
    let spec = CantorSpec::new(vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let d = decide_deterministic(&spec).unwrap();
    assert_eq!(d.verdict, DeterministicVerdict::NoInterval);
    let w = empty_column_depth(&spec, 6).unwrap().unwrap();
    assert!(w.level <= 3, "witness level {}", w.level);
}

#[test]
fn selfcheck_small_bases() {
    let report = selfcheck(5).unwrap();
    assert!(report.passed(), "{:?}", report.cross_validation.failures);
    assert!(report.attractor_scan.all_periods_one);
}
