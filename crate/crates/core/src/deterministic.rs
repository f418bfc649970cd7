//! Complete decision procedure for 0-1 vectors.
//!
//! For a deterministic spec the expectation matrices count triangles, so
//! only the zero/nonzero pattern matters: reducing every matrix entrywise to
//! 0-1 turns digit-word products into boolean matrix products. The sixteen
//! reduced matrices are coded `j = a + 2b + 4c + 8d` for `[[a, b], [c, d]]`,
//! a state of the search is a subset of those sixteen, and the set map
//! `G(C) = { reduce(T T') : T, T' in C }` drives everything: the difference
//! set misses intervals exactly when the zero matrix `T_0` appears in the
//! attractor of `G` started from the level-1 reductions.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{expectation_matrix, CantorSpec, ExpectationMatrix};

/// Default deepest level scanned for an empty column.
pub const DEFAULT_EMPTY_COLUMN_CAP: u32 = 6;

/// A 0-1 2x2 matrix packed into its binary code `a + 2b + 4c + 8d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedMatrix(u8);

/// The zero matrix.
pub const T0: ReducedMatrix = ReducedMatrix(0);

impl ReducedMatrix {
    pub fn from_code(code: u8) -> Result<Self> {
        if code < 16 {
            Ok(ReducedMatrix(code))
        } else {
            Err(Error::IndexOutOfRange {
                what: "reduced matrix code",
                index: code as u64,
                limit: 16,
            })
        }
    }

    pub fn code(&self) -> u8 {
        self.0
    }

    pub fn entries(&self) -> [[u8; 2]; 2] {
        [
            [self.0 & 1, (self.0 >> 1) & 1],
            [(self.0 >> 2) & 1, (self.0 >> 3) & 1],
        ]
    }

    /// Boolean matrix product (AND/OR), equal to reducing the ordinary
    /// integer product.
    pub fn bool_mul(&self, other: &Self) -> Self {
        ReducedMatrix(PRODUCTS[self.0 as usize][other.0 as usize])
    }

    /// True when some row is `(1, 1)`: the column pair it describes holds
    /// both an L- and an R-triangle.
    pub fn has_full_row(&self) -> bool {
        self.0 & 0b0011 == 0b0011 || self.0 & 0b1100 == 0b1100
    }
}

const fn bool_product_code(a: u8, b: u8) -> u8 {
    let (all, alr, arl, arr) = (a & 1, (a >> 1) & 1, (a >> 2) & 1, (a >> 3) & 1);
    let (bll, blr, brl, brr) = (b & 1, (b >> 1) & 1, (b >> 2) & 1, (b >> 3) & 1);
    let ll = (all & bll) | (alr & brl);
    let lr = (all & blr) | (alr & brr);
    let rl = (arl & bll) | (arr & brl);
    let rr = (arl & blr) | (arr & brr);
    ll | (lr << 1) | (rl << 2) | (rr << 3)
}

/// All 256 boolean products, precomputed; the exhaustive scans touch
/// millions of them.
const PRODUCTS: [[u8; 16]; 16] = {
    let mut table = [[0u8; 16]; 16];
    let mut a = 0;
    while a < 16 {
        let mut b = 0;
        while b < 16 {
            table[a][b] = bool_product_code(a as u8, b as u8);
            b += 1;
        }
        a += 1;
    }
    table
};

/// Entrywise 0-1 reduction of a nonnegative integer matrix, packed by the
/// binary coding.
pub fn reduce(m: &[[u64; 2]; 2]) -> ReducedMatrix {
    let bit = |x: u64| u8::from(x > 0);
    ReducedMatrix(bit(m[0][0]) | (bit(m[0][1]) << 1) | (bit(m[1][0]) << 2) | (bit(m[1][1]) << 3))
}

/// Reduction of an expectation matrix; for 0-1 specs the entries are exact
/// small integers, so zero tests are exact.
pub fn reduce_expectation(m: &ExpectationMatrix) -> ReducedMatrix {
    let bit = |x: f64| u8::from(x != 0.0);
    ReducedMatrix(bit(m.ll) | (bit(m.lr) << 1) | (bit(m.rl) << 2) | (bit(m.rr) << 3))
}

/// A subset of the sixteen reduced matrices, as a 16-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixSet(u16);

impl MatrixSet {
    pub const EMPTY: Self = MatrixSet(0);

    pub fn from_mask(mask: u16) -> Self {
        MatrixSet(mask)
    }

    pub fn mask(&self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, m: ReducedMatrix) {
        self.0 |= 1 << m.0;
    }

    pub fn contains(&self, m: ReducedMatrix) -> bool {
        self.0 & (1 << m.0) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(&self, other: &MatrixSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn codes(&self) -> Vec<u8> {
        (0..16u8).filter(|&c| self.0 & (1 << c) != 0).collect()
    }
}

impl FromIterator<ReducedMatrix> for MatrixSet {
    fn from_iter<I: IntoIterator<Item = ReducedMatrix>>(iter: I) -> Self {
        let mut set = MatrixSet::EMPTY;
        for m in iter {
            set.insert(m);
        }
        set
    }
}

impl Serialize for MatrixSet {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.codes().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MatrixSet {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let codes = Vec::<u8>::deserialize(deserializer)?;
        let mut set = MatrixSet::EMPTY;
        for c in codes {
            set.insert(ReducedMatrix::from_code(c).map_err(serde::de::Error::custom)?);
        }
        Ok(set)
    }
}

/// One application of the set map: all reduced ordered products of members.
/// The empty set maps to itself.
pub fn g_step(set: MatrixSet) -> MatrixSet {
    let mut out = 0u16;
    let codes = set.codes();
    for &a in &codes {
        for &b in &codes {
            out |= 1 << PRODUCTS[a as usize][b as usize];
        }
    }
    MatrixSet(out)
}

/// Orbit of one starting set: the states visited until the first repetition,
/// split into a preperiod and a cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorReport {
    /// First state of the cycle.
    pub attractor: MatrixSet,
    /// Steps before the orbit enters the cycle.
    pub preperiod: u32,
    /// Cycle length.
    pub period: u32,
    /// All distinct states in visiting order (preperiod then cycle).
    pub trajectory: Vec<MatrixSet>,
}

impl AttractorReport {
    pub fn cycle_states(&self) -> &[MatrixSet] {
        &self.trajectory[self.preperiod as usize..]
    }

    /// Membership in the attractor. `T_0` persists under `G`, so for it
    /// this is independent of which cycle state is inspected.
    pub fn cycle_contains(&self, m: ReducedMatrix) -> bool {
        self.cycle_states().iter().any(|s| s.contains(m))
    }
}

/// Iterates the set map from `initial`, recording states until repetition.
/// There are at most 2^16 states, so this always terminates.
pub fn attractor(initial: MatrixSet) -> AttractorReport {
    let mut seen: HashMap<u16, u32> = HashMap::new();
    let mut trajectory = Vec::new();
    let mut state = initial;
    loop {
        if let Some(&first) = seen.get(&state.0) {
            let preperiod = first;
            let period = trajectory.len() as u32 - first;
            return AttractorReport {
                attractor: trajectory[preperiod as usize],
                preperiod,
                period,
                trajectory,
            };
        }
        seen.insert(state.0, trajectory.len() as u32);
        trajectory.push(state);
        state = g_step(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeterministicVerdict {
    Interval,
    NoInterval,
}

/// Verdict and evidence for a 0-1 spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicDecision {
    pub verdict: DeterministicVerdict,
    /// Level-1 reductions the iteration starts from.
    pub initial: MatrixSet,
    pub report: AttractorReport,
    /// Set when fewer than two digits are selected; a set that is empty or
    /// a single point has an empty-interior difference regardless of the
    /// attractor.
    pub degenerate: bool,
}

fn require_deterministic_one_vector(spec: &CantorSpec) -> Result<()> {
    if !spec.is_deterministic() {
        return Err(Error::Precondition(
            "deterministic decision requires every probability to be 0 or 1".into(),
        ));
    }
    if let Some(q) = spec.q_explicit() {
        if q != spec.p() {
            return Err(Error::Precondition(
                "deterministic decision is defined for a single vector (q must be absent or equal to p)"
                    .into(),
            ));
        }
    }
    Ok(())
}

fn initial_set(spec: &CantorSpec) -> Result<MatrixSet> {
    (0..spec.base())
        .map(|k| Ok(reduce_expectation(&expectation_matrix(spec, k)?)))
        .collect()
}

/// Full deterministic decision: the difference set contains no interval
/// exactly when `T_0` belongs to the attractor of `G` started from the
/// level-1 reductions.
pub fn decide_deterministic(spec: &CantorSpec) -> Result<DeterministicDecision> {
    require_deterministic_one_vector(spec)?;
    let initial = initial_set(spec)?;
    let report = attractor(initial);
    let digit_count = spec.p().iter().filter(|&&x| x == 1.0).count();
    let degenerate = digit_count < 2;
    let verdict = if degenerate || report.cycle_contains(T0) {
        DeterministicVerdict::NoInterval
    } else {
        DeterministicVerdict::Interval
    };
    Ok(DeterministicDecision {
        verdict,
        initial,
        report,
        degenerate,
    })
}

/// An order-n column index whose total triangle count `Z^L + Z^R` is zero:
/// neither the positive nor the negative column of that index contains any
/// triangle. Equivalently, the reduced matrix product over the index digits
/// is the zero matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptyColumnWitness {
    pub level: u32,
    pub index: u64,
    /// Base-M digits of `index`, most significant first.
    pub digits: Vec<u32>,
}

/// Occupied signed column values at each level, for a deterministic spec.
///
/// Survivor index pairs factor digit-wise, so the set of differences
/// `{ i - j }` at level n is built recursively from the level-1 digit
/// differences instead of enumerating pairs.
struct OccupancyScan {
    base: i64,
    level: u32,
    /// Membership of `v` in the difference set, offset by `M^level - 1`.
    diffs: Vec<bool>,
    digit_diffs: Vec<i64>,
}

impl OccupancyScan {
    fn new(spec: &CantorSpec) -> Self {
        let m = spec.base() as i64;
        let supp = |v: &[f64]| -> Vec<i64> {
            v.iter()
                .enumerate()
                .filter(|(_, &x)| x == 1.0)
                .map(|(i, _)| i as i64)
                .collect()
        };
        let sp = supp(spec.p());
        let sq = supp(spec.q());
        let mut digit_diffs: Vec<i64> = sp
            .iter()
            .flat_map(|&a| sq.iter().map(move |&b| a - b))
            .collect();
        digit_diffs.sort_unstable();
        digit_diffs.dedup();
        let mut diffs = vec![false; (2 * m - 1) as usize];
        for &d in &digit_diffs {
            diffs[(d + m - 1) as usize] = true;
        }
        OccupancyScan {
            base: m,
            level: 1,
            diffs,
            digit_diffs,
        }
    }

    fn span(&self) -> i64 {
        self.base.pow(self.level)
    }

    fn advance(&mut self) {
        let prev_span = self.span();
        let next_span = prev_span * self.base;
        let mut next = vec![false; (2 * next_span - 1) as usize];
        for &d in &self.digit_diffs {
            let shift = d * prev_span;
            for (idx, &occ) in self.diffs.iter().enumerate() {
                if occ {
                    let e = idx as i64 - (prev_span - 1);
                    next[(shift + e + next_span - 1) as usize] = true;
                }
            }
        }
        self.diffs = next;
        self.level += 1;
    }

    fn contains_diff(&self, v: i64) -> bool {
        let span = self.span();
        if v <= -span || v >= span {
            return false;
        }
        self.diffs[(v + span - 1) as usize]
    }

    /// Signed column `v` holds an R-triangle iff `v` is a difference and an
    /// L-triangle iff `v + 1` is.
    fn column_occupied(&self, v: i64) -> bool {
        self.contains_diff(v) || self.contains_diff(v + 1)
    }

    /// Smallest index `k` whose positive and negative columns are both
    /// empty, i.e. a zero word for the reduced matrix product.
    fn first_zero_index(&self) -> Option<u64> {
        let span = self.span();
        (0..span)
            .find(|&k| !self.column_occupied(k) && !self.column_occupied(k - span))
            .map(|k| k as u64)
    }

    /// Every signed column, on either side separately, holds a triangle.
    fn all_columns_occupied(&self) -> bool {
        let span = self.span();
        (-span..span).all(|v| self.column_occupied(v))
    }
}

/// Brute-force scan of column occupancy by level, up to `cap`: the first
/// level with a column holding no triangle, or `None`.
///
/// Reaching the cap without a witness while `T_0` sits in the attractor is
/// an inconsistency (it would falsify either this implementation or the
/// verified attractor claim), reported as an error.
pub fn empty_column_depth(spec: &CantorSpec, cap: u32) -> Result<Option<EmptyColumnWitness>> {
    require_deterministic_one_vector(spec)?;
    if cap == 0 {
        return Err(Error::Precondition("scan cap must be >= 1".into()));
    }
    let mut scan = OccupancyScan::new(spec);
    loop {
        if let Some(index) = scan.first_zero_index() {
            return Ok(Some(EmptyColumnWitness {
                level: scan.level,
                index,
                digits: crate::spectrum::digits_of_index(index, spec.base(), scan.level),
            }));
        }
        if scan.level == cap {
            break;
        }
        let next_entries = 2u128 * (spec.base() as u128).pow(scan.level + 1);
        if next_entries > 100_000_000 {
            return Err(Error::BudgetExceeded {
                what: format!("occupancy scan entries at level {}", scan.level + 1),
                needed: next_entries,
                cap: 100_000_000,
            });
        }
        scan.advance();
    }
    let decision = decide_deterministic(spec)?;
    if decision.verdict == DeterministicVerdict::NoInterval && !decision.degenerate {
        return Err(Error::Inconsistency(format!(
            "T0 is in the attractor but no empty column was found up to level {cap}"
        )));
    }
    Ok(None)
}

/// Result of the exhaustive orbit scan over all 2^16 starting sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorScanReport {
    pub starts: u32,
    pub all_periods_one: bool,
    pub max_period: u32,
    pub max_preperiod: u32,
}

/// Iterates the set map from every one of the 2^16 starting sets and
/// reports the orbit structure; verifies (rather than assumes) that every
/// attractor is a fixed point.
pub fn attractor_period_scan() -> AttractorScanReport {
    // Memoised functional-graph walk over the precomputed step table.
    let step: Vec<u16> = (0..=u16::MAX).map(|m| g_step(MatrixSet(m)).0).collect();
    let mut period = vec![0u32; 1 << 16];
    let mut preperiod = vec![0u32; 1 << 16];
    let mut state = vec![0u8; 1 << 16]; // 0 unvisited, 1 on stack, 2 done
    let mut path: Vec<u16> = Vec::new();
    for start in 0..=u16::MAX {
        if state[start as usize] != 0 {
            continue;
        }
        path.clear();
        let mut v = start;
        while state[v as usize] == 0 {
            state[v as usize] = 1;
            path.push(v);
            v = step[v as usize];
        }
        let mut tail_info = if state[v as usize] == 1 {
            // Found a new cycle: everything in the path from v onward.
            let cycle_start = path.iter().position(|&u| u == v).unwrap();
            let len = (path.len() - cycle_start) as u32;
            for &u in &path[cycle_start..] {
                period[u as usize] = len;
                preperiod[u as usize] = 0;
                state[u as usize] = 2;
            }
            path.truncate(cycle_start);
            (len, 0u32)
        } else {
            (period[v as usize], preperiod[v as usize])
        };
        for &u in path.iter().rev() {
            tail_info.1 += 1;
            period[u as usize] = tail_info.0;
            preperiod[u as usize] = tail_info.1;
            state[u as usize] = 2;
        }
    }
    AttractorScanReport {
        starts: 1 << 16,
        all_periods_one: period.iter().all(|&p| p == 1),
        max_period: period.iter().copied().max().unwrap(),
        max_preperiod: preperiod.iter().copied().max().unwrap(),
    }
}

/// Cross-validation of the attractor criterion against brute-force column
/// occupancy, over every 0-1 vector with base `2..=max_base` and at least
/// two selected digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossValidationReport {
    pub max_base: u32,
    pub vectors_checked: u32,
    /// NoInterval verdicts matched an empty column at level <= 3 and
    /// Interval verdicts had none.
    pub verdicts_consistent: bool,
    /// Interval verdicts whose attractor avoids full rows stayed inside
    /// {T5, T6, T9, T10} and kept every column occupied through level 4.
    pub case_analysis_consistent: bool,
    pub failures: Vec<String>,
}

pub fn cross_validate(max_base: u32) -> Result<CrossValidationReport> {
    let witness_level_bound = 3;
    let occupancy_level_bound = 4;
    let case2 = MatrixSet::from_mask(1 << 5 | 1 << 6 | 1 << 9 | 1 << 10);

    let instances: Vec<(u32, u32)> = (2..=max_base)
        .flat_map(|m| (0u32..1 << m).map(move |mask| (m, mask)))
        .filter(|&(m, mask)| mask.count_ones() >= 2 && m >= 2)
        .collect();

    let failures: Vec<String> = instances
        .par_iter()
        .map(|&(m, mask)| -> Result<Vec<String>> {
            let p: Vec<f64> = (0..m)
                .map(|i| if mask & (1 << i) != 0 { 1.0 } else { 0.0 })
                .collect();
            let spec = CantorSpec::new(p.clone())?;
            let decision = decide_deterministic(&spec)?;
            let witness = empty_column_depth(&spec, witness_level_bound)?;
            let mut local = Vec::new();
            match decision.verdict {
                DeterministicVerdict::NoInterval => {
                    if witness.is_none() {
                        local.push(format!(
                            "{p:?}: NoInterval but no empty column up to level {witness_level_bound}"
                        ));
                    }
                }
                DeterministicVerdict::Interval => {
                    if let Some(w) = witness {
                        local.push(format!(
                            "{p:?}: Interval but empty column at level {}",
                            w.level
                        ));
                    }
                }
            }
            // Case analysis replay: attractors without T0 and without any
            // full-row matrix must sit inside {T5, T6, T9, T10}, and such
            // vectors must keep every column occupied.
            if decision.verdict == DeterministicVerdict::Interval {
                let cycle_union = decision
                    .report
                    .cycle_states()
                    .iter()
                    .fold(MatrixSet::EMPTY, |acc, s| {
                        MatrixSet::from_mask(acc.mask() | s.mask())
                    });
                let has_full_row = cycle_union
                    .codes()
                    .iter()
                    .any(|&c| ReducedMatrix(c).has_full_row());
                if !has_full_row && !cycle_union.is_subset_of(&case2) {
                    local.push(format!(
                        "{p:?}: attractor {:?} without full rows escapes {{T5, T6, T9, T10}}",
                        cycle_union.codes()
                    ));
                }
                if cycle_union.is_subset_of(&case2) {
                    let mut scan = OccupancyScan::new(&spec);
                    loop {
                        if !scan.all_columns_occupied() {
                            local.push(format!(
                                "{p:?}: tame attractor but empty column at level {}",
                                scan.level
                            ));
                            break;
                        }
                        if scan.level == occupancy_level_bound {
                            break;
                        }
                        scan.advance();
                    }
                }
            }
            Ok(local)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let verdicts_consistent = failures
        .iter()
        .all(|f| !f.contains("empty column up to") && !f.contains("Interval but"));
    let case_analysis_consistent = failures
        .iter()
        .all(|f| !f.contains("escapes") && !f.contains("tame attractor"));
    Ok(CrossValidationReport {
        max_base,
        vectors_checked: instances.len() as u32,
        verdicts_consistent,
        case_analysis_consistent,
        failures,
    })
}

/// Both exhaustive scans in one report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub attractor_scan: AttractorScanReport,
    pub cross_validation: CrossValidationReport,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.attractor_scan.all_periods_one
            && self.cross_validation.verdicts_consistent
            && self.cross_validation.case_analysis_consistent
            && self.cross_validation.failures.is_empty()
    }
}

pub fn selfcheck(max_base: u32) -> Result<SelfCheckReport> {
    Ok(SelfCheckReport {
        attractor_scan: attractor_period_scan(),
        cross_validation: cross_validate(max_base)?,
    })
}
