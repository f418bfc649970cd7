//! Seeded Monte Carlo realisation of the labeled-tree construction.
//!
//! One trial draws the two random sets level by level: each child interval
//! of a survivor is kept independently with its digit's probability. Labels
//! come from a counter-based generator keyed by `(seed, trial, side, node,
//! level)`, so identical inputs give bit-identical samples no matter how
//! trials are scheduled across workers. The column statistics count the L-
//! and R-triangles of surviving square pairs per projection column, which is
//! what validates the expectation matrices empirically.

mod rng;

pub use rng::node_uniform;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{expectation_matrix, word_matrix, CantorSpec, ColumnSide};

/// Default cap on the expected number of survivors at the deepest level.
pub const DEFAULT_SURVIVOR_CAP: f64 = 1e7;

/// Above this many index pairs the histogram switches away from the plain
/// nested loop.
const PAIR_THRESHOLD: u128 = 1_000_000;

/// Which of the two independent sets a sample realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSide {
    /// Driven by `p`.
    First = 1,
    /// Driven by `q` (which is `p` in one-vector mode).
    Second = 2,
}

/// Per-level survivor index sets of one realisation; level n holds the
/// integers whose base-M digit strings survived through level n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSample {
    base: u32,
    levels: Vec<Vec<u64>>,
}

impl CantorSample {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn survivors(&self, level: u32) -> Result<&[u64]> {
        self.levels
            .get(level as usize)
            .map(|v| v.as_slice())
            .ok_or(Error::LevelMissing(level))
    }

    pub fn count(&self, level: u32) -> Result<u64> {
        Ok(self.survivors(level)?.len() as u64)
    }
}

/// Draws one realisation of the labeled tree down to `n_max`.
///
/// The root always survives. A child with digit `d` of a surviving node `v`
/// is kept iff the keyed uniform draw for node `v * M + d` at its level is
/// below the digit probability, so degenerate probabilities 0 and 1 behave
/// exactly.
pub fn sample(
    spec: &CantorSpec,
    side: SampleSide,
    n_max: u32,
    seed: u64,
    trial: u64,
) -> Result<CantorSample> {
    sample_with_cap(spec, side, n_max, seed, trial, DEFAULT_SURVIVOR_CAP)
}

pub fn sample_with_cap(
    spec: &CantorSpec,
    side: SampleSide,
    n_max: u32,
    seed: u64,
    trial: u64,
    survivor_cap: f64,
) -> Result<CantorSample> {
    let m = spec.base() as u64;
    if (m as u128)
        .checked_pow(n_max)
        .is_none_or(|v| v > u64::MAX as u128)
    {
        return Err(Error::BudgetExceeded {
            what: format!("level index width at level {n_max}"),
            needed: u128::MAX,
            cap: u64::MAX as u128,
        });
    }
    let probs = match side {
        SampleSide::First => spec.p(),
        SampleSide::Second => spec.q(),
    };
    let mean_offspring: f64 = probs.iter().sum();
    let expected_final = mean_offspring.powi(n_max as i32);
    if expected_final > survivor_cap {
        return Err(Error::BudgetExceeded {
            what: format!("expected survivors at level {n_max}"),
            needed: expected_final.min(u128::MAX as f64) as u128,
            cap: survivor_cap as u128,
        });
    }
    let side_tag = side as u8;
    let mut levels = Vec::with_capacity(n_max as usize + 1);
    levels.push(vec![0u64]);
    for level in 1..=n_max {
        let prev = &levels[(level - 1) as usize];
        let mut next = Vec::new();
        for &node in prev {
            for (digit, &prob) in probs.iter().enumerate() {
                let child = node * m + digit as u64;
                if node_uniform(seed, trial, side_tag, child, level) < prob {
                    next.push(child);
                }
            }
        }
        levels.push(next);
    }
    Ok(CantorSample {
        base: spec.base(),
        levels,
    })
}

/// Per-column L/R triangle counts of one level of a sample pair, indexed by
/// the signed column value `v` in `[-M^n, M^n)` (negative side first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnHistogram {
    base: u32,
    level: u32,
    z_l: Vec<u64>,
    z_r: Vec<u64>,
}

impl ColumnHistogram {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn span(&self) -> u64 {
        (self.base as u64).pow(self.level)
    }

    /// Counts at a column given by side and index.
    pub fn counts(&self, side: ColumnSide, index: u64) -> (u64, u64) {
        let span = self.span();
        let slot = match side {
            ColumnSide::Positive => (index + span) as usize,
            ColumnSide::Negative => index as usize,
        };
        (self.z_l[slot], self.z_r[slot])
    }

    /// Counts indexed by signed column value, from `-M^n` to `M^n - 1`.
    pub fn by_signed_column(&self) -> impl Iterator<Item = (i64, u64, u64)> + '_ {
        let span = self.span() as i64;
        self.z_l
            .iter()
            .zip(self.z_r.iter())
            .enumerate()
            .map(move |(slot, (&l, &r))| (slot as i64 - span, l, r))
    }

    /// Total triangle count; always `2 |S1| |S2|`.
    pub fn total(&self) -> u128 {
        self.z_l.iter().map(|&x| x as u128).sum::<u128>()
            + self.z_r.iter().map(|&x| x as u128).sum::<u128>()
    }
}

/// Lag counts `c[t] = #{(i, j) : i - j = t}` over two survivor sets,
/// without materialising pairs: either counting-sort accumulation over the
/// index pairs, or, for dense large instances, a bitset convolution.
fn lag_counts(s1: &[u64], s2: &[u64], span: u64) -> Vec<u64> {
    let offset = span as i64 - 1;
    let mut counts = vec![0u64; 2 * span as usize - 1];
    let products = s1.len() as u128 * s2.len() as u128;
    let dense = |s: &[u64]| s.len() as u64 * 2 >= span;
    if products > PAIR_THRESHOLD && dense(s1) && dense(s2) {
        let words = (span as usize).div_ceil(64);
        let to_bits = |s: &[u64]| {
            let mut bits = vec![0u64; words];
            for &x in s {
                bits[(x / 64) as usize] |= 1 << (x % 64);
            }
            bits
        };
        let b1 = to_bits(s1);
        let b2 = to_bits(s2);
        let window = |s: i64| -> u64 {
            // Bits s .. s+64 of b2, zero outside the range.
            let lo = s.div_euclid(64);
            let sh = s.rem_euclid(64) as u32;
            let get = |i: i64| -> u64 {
                if (0..words as i64).contains(&i) {
                    b2[i as usize]
                } else {
                    0
                }
            };
            if sh == 0 {
                get(lo)
            } else {
                (get(lo) >> sh) | (get(lo + 1) << (64 - sh))
            }
        };
        for t in -(span as i64 - 1)..span as i64 {
            let mut acc = 0u64;
            for (w, &a) in b1.iter().enumerate() {
                if a != 0 {
                    acc += (a & window(w as i64 * 64 - t)).count_ones() as u64;
                }
            }
            counts[(t + offset) as usize] = acc;
        }
    } else {
        for &i in s1 {
            for &j in s2 {
                counts[(i as i64 - j as i64 + offset) as usize] += 1;
            }
        }
    }
    counts
}

/// Column histogram of a sample pair at one level.
///
/// Every surviving square pair `(i, j)` contributes one R-triangle to the
/// signed column `i - j` and one L-triangle to `i - j - 1`, so the whole
/// histogram is a lag histogram of the index difference.
pub fn column_histogram(
    s1: &CantorSample,
    s2: &CantorSample,
    level: u32,
) -> Result<ColumnHistogram> {
    let sv1 = s1.survivors(level)?;
    let sv2 = s2.survivors(level)?;
    let base = s1.base;
    let wide = 2u128 * (base as u128).pow(level);
    if wide > 200_000_000 {
        return Err(Error::BudgetExceeded {
            what: format!("column histogram width at level {level}"),
            needed: wide,
            cap: 200_000_000,
        });
    }
    let span = (base as u64).pow(level);
    let counts = lag_counts(sv1, sv2, span);
    let c_at = |v: i64| -> u64 {
        let idx = v + span as i64 - 1;
        if (0..counts.len() as i64).contains(&idx) {
            counts[idx as usize]
        } else {
            0
        }
    };
    let mut z_l = vec![0u64; 2 * span as usize];
    let mut z_r = vec![0u64; 2 * span as usize];
    for slot in 0..2 * span as usize {
        let v = slot as i64 - span as i64;
        z_r[slot] = c_at(v);
        z_l[slot] = c_at(v + 1);
    }
    Ok(ColumnHistogram {
        base,
        level,
        z_l,
        z_r,
    })
}

/// Per-level aggregate statistics of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: u32,
    /// Mean of the survivor count of the first set.
    pub survivors_mean: f64,
    /// Unbiased sample variance of the survivor count.
    pub survivors_var: f64,
    /// Fraction of trials whose first set is still nonempty.
    pub survival_rate: f64,
    /// Mean of `log(Z_n) / (n log M)` over surviving trials; absent at
    /// level 0 and when nothing survived.
    pub dim_estimate: Option<f64>,
}

/// Empirical per-column means of the level-1 histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMeanStats {
    pub side: ColumnSide,
    pub index: u64,
    pub mean_z_l: f64,
    pub mean_z_r: f64,
}

/// Aggregated output of [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationStats {
    pub base: u32,
    pub trials: u64,
    pub levels: u32,
    pub seed: u64,
    pub per_level: Vec<LevelStats>,
    /// Dimension estimate at the deepest level, over surviving trials.
    pub dimension_estimate: Option<f64>,
    /// Level-1 column means in signed-column order (negative side first).
    pub column_means_level1: Vec<ColumnMeanStats>,
}

impl SimulationStats {
    /// CSV rows, one per level. The dimension column is empty where no
    /// estimate exists.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("level,trials,survivors_mean,survivors_var,survival_rate,dim_estimate\n");
        for row in &self.per_level {
            let dim = row.dim_estimate.map(|d| d.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.level,
                self.trials,
                row.survivors_mean,
                row.survivors_var,
                row.survival_rate,
                dim
            ));
        }
        out
    }
}

struct TrialSummary {
    z1: Vec<u64>,
    level1: ColumnHistogram,
}

/// Runs `trials` independent sample pairs and aggregates survival, survivor
/// moments, dimension estimates and level-1 column means.
///
/// Trials are distributed across the current rayon pool; the per-trial
/// summaries are collected in trial order and folded sequentially, so the
/// output is byte-identical for any worker count.
pub fn run_experiment(
    spec: &CantorSpec,
    n_max: u32,
    trials: u64,
    seed: u64,
) -> Result<SimulationStats> {
    run_experiment_with_cap(spec, n_max, trials, seed, DEFAULT_SURVIVOR_CAP)
}

pub fn run_experiment_with_cap(
    spec: &CantorSpec,
    n_max: u32,
    trials: u64,
    seed: u64,
    survivor_cap: f64,
) -> Result<SimulationStats> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be >= 1".into()));
    }
    if n_max < 1 {
        return Err(Error::Precondition("levels must be >= 1".into()));
    }
    let summaries: Vec<TrialSummary> = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialSummary> {
            let s1 = sample_with_cap(spec, SampleSide::First, n_max, seed, trial, survivor_cap)?;
            let s2 = sample_with_cap(spec, SampleSide::Second, n_max, seed, trial, survivor_cap)?;
            let level1 = column_histogram(&s1, &s2, 1)?;
            let z1 = (0..=n_max)
                .map(|n| s1.count(n))
                .collect::<Result<Vec<_>>>()?;
            Ok(TrialSummary { z1, level1 })
        })
        .collect::<Result<Vec<_>>>()?;

    let t = trials as f64;
    let mut per_level = Vec::with_capacity(n_max as usize + 1);
    let log_m = (spec.base() as f64).ln();
    let mut final_dim = None;
    for level in 0..=n_max {
        let mut sum: u128 = 0;
        let mut sum_sq: u128 = 0;
        let mut alive: u64 = 0;
        let mut dim_sum = 0.0f64;
        for s in &summaries {
            let z = s.z1[level as usize];
            sum += z as u128;
            sum_sq += (z as u128) * (z as u128);
            if z > 0 {
                alive += 1;
                if level > 0 {
                    dim_sum += (z as f64).ln() / (level as f64 * log_m);
                }
            }
        }
        let mean = sum as f64 / t;
        let var = if trials > 1 {
            (sum_sq as f64 - (sum as f64) * (sum as f64) / t) / (t - 1.0)
        } else {
            0.0
        };
        let dim_estimate = (level > 0 && alive > 0).then(|| dim_sum / alive as f64);
        if level == n_max {
            final_dim = dim_estimate;
        }
        per_level.push(LevelStats {
            level,
            survivors_mean: mean,
            survivors_var: var,
            survival_rate: alive as f64 / t,
            dim_estimate,
        });
    }

    let m = spec.base() as usize;
    let mut sums_l = vec![0u128; 2 * m];
    let mut sums_r = vec![0u128; 2 * m];
    for s in &summaries {
        for (slot, (l, r)) in s.level1.z_l.iter().zip(s.level1.z_r.iter()).enumerate() {
            sums_l[slot] += *l as u128;
            sums_r[slot] += *r as u128;
        }
    }
    let column_means_level1 = (0..2 * m)
        .map(|slot| {
            let v = slot as i64 - m as i64;
            let (side, index) = if v >= 0 {
                (ColumnSide::Positive, v as u64)
            } else {
                (ColumnSide::Negative, (v + m as i64) as u64)
            };
            ColumnMeanStats {
                side,
                index,
                mean_z_l: sums_l[slot] as f64 / t,
                mean_z_r: sums_r[slot] as f64 / t,
            }
        })
        .collect();

    Ok(SimulationStats {
        base: spec.base(),
        trials,
        levels: n_max,
        seed,
        per_level,
        dimension_estimate: final_dim,
        column_means_level1,
    })
}

/// Matrix 1-norms along `prefix` followed by `m` copies of digit `k`, for
/// `m = 1..=m_max`. By the Markov inequality each norm bounds the
/// probability that the corresponding column is still occupied, so decay to
/// zero corroborates asymptotically empty columns.
pub fn expected_column_decay(
    spec: &CantorSpec,
    prefix: &[u32],
    k: u32,
    m_max: u32,
) -> Result<Vec<f64>> {
    let step = expectation_matrix(spec, k)?;
    let mut acc = word_matrix(spec, prefix)?;
    let mut norms = Vec::with_capacity(m_max as usize);
    for _ in 0..m_max {
        acc = acc.mul(&step);
        norms.push(acc.one_norm());
    }
    Ok(norms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{correlations, higher_order, pf_eigenvalue};

    fn spec(p: &[f64]) -> CantorSpec {
        CantorSpec::new(p.to_vec()).unwrap()
    }

    #[test]
    fn all_ones_survive_everything() {
        let s = sample(&spec(&[1.0, 1.0, 1.0]), SampleSide::First, 3, 1, 0).unwrap();
        for n in 0..=3 {
            let expect: Vec<u64> = (0..3u64.pow(n)).collect();
            assert_eq!(s.survivors(n).unwrap(), expect.as_slice());
        }
    }

    #[test]
    fn degenerate_digits_give_digit_restricted_sets() {
        let s = sample(&spec(&[1.0, 0.0, 1.0]), SampleSide::First, 4, 9, 2).unwrap();
        for n in 0..=4 {
            for &v in s.survivors(n).unwrap() {
                let mut rest = v;
                for _ in 0..n {
                    assert_ne!(rest % 3, 1);
                    rest /= 3;
                }
            }
            assert_eq!(s.count(n).unwrap(), 2u64.pow(n));
        }
    }

    #[test]
    fn hereditary_and_sorted() {
        let s = sample(&spec(&[0.7, 0.4, 0.9]), SampleSide::Second, 6, 123, 17).unwrap();
        for n in 1..=6u32 {
            let prev = s.survivors(n - 1).unwrap();
            let cur = s.survivors(n).unwrap();
            assert!(cur.windows(2).all(|w| w[0] < w[1]));
            for &v in cur {
                assert!(prev.binary_search(&(v / 3)).is_ok());
            }
        }
    }

    #[test]
    fn mean_offspring_close_to_sum() {
        let s = spec(&[0.7, 0.7]);
        let trials = 100_000u64;
        let mut total = 0u64;
        for t in 0..trials {
            total += sample(&s, SampleSide::First, 1, 5, t)
                .unwrap()
                .count(1)
                .unwrap();
        }
        let mean = total as f64 / trials as f64;
        // Var(Z1) = 2 * 0.7 * 0.3 = 0.42; 3 standard errors.
        let se = (0.42f64 / trials as f64).sqrt();
        assert!((mean - 1.4).abs() < 3.0 * se, "mean = {mean}");
    }

    #[test]
    fn budget_cap() {
        let err = sample_with_cap(&spec(&[1.0, 1.0]), SampleSide::First, 30, 0, 0, 1e6);
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn full_square_level1_histogram() {
        let s1 = sample(&spec(&[1.0, 1.0]), SampleSide::First, 1, 0, 0).unwrap();
        let s2 = sample(&spec(&[1.0, 1.0]), SampleSide::Second, 1, 0, 0).unwrap();
        let h = column_histogram(&s1, &s2, 1).unwrap();
        assert_eq!(h.counts(ColumnSide::Positive, 0), (1, 2));
        assert_eq!(h.counts(ColumnSide::Positive, 1), (0, 1));
        assert_eq!(h.counts(ColumnSide::Negative, 1), (2, 1));
        assert_eq!(h.counts(ColumnSide::Negative, 0), (1, 0));
        assert_eq!(h.total(), 8);
    }

    #[test]
    fn empty_sample_gives_zero_histogram() {
        let s1 = sample(&spec(&[0.0, 0.0]), SampleSide::First, 1, 0, 0).unwrap();
        let s2 = sample(&spec(&[1.0, 1.0]), SampleSide::Second, 1, 0, 0).unwrap();
        let h = column_histogram(&s1, &s2, 1).unwrap();
        assert_eq!(h.total(), 0);
    }

    #[test]
    fn histogram_total_identity() {
        let s = spec(&[0.9, 0.6, 0.8]);
        for trial in 0..50 {
            let s1 = sample(&s, SampleSide::First, 4, 11, trial).unwrap();
            let s2 = sample(&s, SampleSide::Second, 4, 11, trial).unwrap();
            for level in 0..=4 {
                let h = column_histogram(&s1, &s2, level).unwrap();
                let expect =
                    2 * s1.count(level).unwrap() as u128 * s2.count(level).unwrap() as u128;
                assert_eq!(h.total(), expect);
            }
        }
    }

    #[test]
    fn lag_count_strategies_agree() {
        // Dense bitset path vs nested loop on the same survivor sets.
        let span = 3u64.pow(7);
        let s1: Vec<u64> = (0..span).filter(|v| v % 7 != 0).collect();
        let s2: Vec<u64> = (0..span).filter(|v| v % 5 != 1).collect();
        assert!(s1.len() as u128 * s2.len() as u128 > PAIR_THRESHOLD);
        let fast = lag_counts(&s1, &s2, span);
        let mut slow = vec![0u64; 2 * span as usize - 1];
        for &i in &s1 {
            for &j in &s2 {
                slow[(i as i64 - j as i64 + span as i64 - 1) as usize] += 1;
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn missing_level_is_an_error() {
        let s1 = sample(&spec(&[1.0, 1.0]), SampleSide::First, 1, 0, 0).unwrap();
        let s2 = sample(&spec(&[1.0, 1.0]), SampleSide::Second, 2, 0, 0).unwrap();
        assert!(matches!(
            column_histogram(&s1, &s2, 2),
            Err(Error::LevelMissing(2))
        ));
    }

    #[test]
    fn experiment_reproducible_across_worker_counts() {
        let s = spec(&[0.8, 0.8, 0.8]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_experiment(&s, 5, 2_000, 42).unwrap())
        };
        let one = run(1);
        let eight = run(8);
        assert_eq!(one, eight);
        assert_eq!(
            serde_json::to_string(&one).unwrap(),
            serde_json::to_string(&eight).unwrap()
        );
        assert_eq!(one.to_csv(), eight.to_csv());
    }

    #[test]
    fn experiment_statistics_sane() {
        let s = spec(&[0.8, 0.8, 0.8]);
        let stats = run_experiment(&s, 6, 4_000, 7).unwrap();
        assert_eq!(stats.per_level.len(), 7);
        // E Z_1 = 2.4.
        assert!((stats.per_level[1].survivors_mean - 2.4).abs() < 0.1);
        // Survival rates never increase in the level.
        for w in stats.per_level.windows(2) {
            assert!(w[1].survival_rate <= w[0].survival_rate + 1e-12);
        }
        // Dimension estimate drifts toward log 2.4 / log 3.
        let dim = stats.dimension_estimate.unwrap();
        assert!((dim - 2.4f64.ln() / 3f64.ln()).abs() < 0.1, "dim = {dim}");
        let csv = stats.to_csv();
        assert!(csv.starts_with("level,trials,"));
        assert_eq!(csv.lines().count(), 8);
    }

    #[test]
    fn dimension_estimate_converges_for_uniform_probabilities() {
        // Expected dimension log(3 * 0.8) / log 3 for uniform 0.8.
        let s = spec(&[0.8, 0.8, 0.8]);
        let stats = run_experiment(&s, 8, 10_000, 11).unwrap();
        let want = 2.4f64.ln() / 3f64.ln();
        let got = stats.dimension_estimate.unwrap();
        assert!((got - want).abs() < 0.05, "estimate {got}, want {want}");
    }

    #[test]
    fn constant_digit_columns_empty_out() {
        // For (1, 0, 0.75) the correlation at lag 1 is below 1, so the
        // all-ones-digit column empties out with growing level.
        let s = spec(&[1.0, 0.0, 0.75]);
        let trials = 4_000u64;
        let fraction = |level: u32| -> f64 {
            let index = (3u64.pow(level) - 1) / 2; // digits 1, 1, ..., 1
            let mut empty = 0u64;
            for t in 0..trials {
                let s1 = sample(&s, SampleSide::First, level, 5, t).unwrap();
                let s2 = sample(&s, SampleSide::Second, level, 5, t).unwrap();
                let h = column_histogram(&s1, &s2, level).unwrap();
                let (l, r) = h.counts(ColumnSide::Positive, index);
                if l + r == 0 {
                    empty += 1;
                }
            }
            empty as f64 / trials as f64
        };
        let fractions: Vec<f64> = (1..=4).map(fraction).collect();
        for w in fractions.windows(2) {
            assert!(w[1] > w[0], "fractions not increasing: {fractions:?}");
        }
        assert!(fractions[3] > fractions[0] + 0.2);
    }

    #[test]
    fn subcritical_dies_out() {
        let s = spec(&[0.4, 0.4]);
        let stats = run_experiment(&s, 20, 2_000, 3).unwrap();
        assert!(stats.per_level[20].survival_rate < 0.01);
    }

    #[test]
    fn decay_single_digit_subcritical_column() {
        let s = spec(&[1.0, 0.0, 0.75]);
        let norms = expected_column_decay(&s, &[], 1, 8).unwrap();
        for w in norms.windows(2) {
            assert!(w[1] < w[0]);
        }
        // Column sums are 0.75, so the norm decays geometrically.
        assert!(norms[7] < norms[0] * 0.2);
    }

    #[test]
    fn decay_supercritical_norms_grow() {
        let s = spec(&[0.9, 0.9]);
        let norms = expected_column_decay(&s, &[], 0, 8).unwrap();
        assert!(norms[7] > norms[0]);
    }

    #[test]
    fn decay_rate_matches_eigenvalue_on_lift() {
        // In the order-2 lift of (1,0,1,0.3), digit 3 is the base-4 word
        // (0,3); norms along its repetition decay at the word eigenvalue.
        let s = spec(&[1.0, 0.0, 1.0, 0.3]);
        let lifted = higher_order(&s, 2).unwrap();
        let norms = expected_column_decay(&lifted, &[0], 3, 40).unwrap();
        let lam = pf_eigenvalue(&crate::spectrum::word_matrix(&s, &[0, 3]).unwrap()).unwrap();
        let ratio = norms[39] / norms[38];
        assert!(
            (ratio - lam).abs() < 1e-6,
            "ratio = {ratio}, lambda = {lam}"
        );
        assert!(norms[39] < norms[0]);
    }

    #[test]
    fn level1_column_means_match_expectations_roughly() {
        let s = spec(&[1.0, 0.0, 1.0, 0.3]);
        let stats = run_experiment(&s, 1, 20_000, 99).unwrap();
        let g = correlations(&s);
        // Per signed column the means match the matrix entries: the
        // negative side mirrors the L row, the positive side the R row.
        for cm in &stats.column_means_level1 {
            let mat = expectation_matrix(&s, cm.index as u32).unwrap();
            let (want_l, want_r) = match cm.side {
                ColumnSide::Negative => (mat.ll, mat.lr),
                ColumnSide::Positive => (mat.rl, mat.rr),
            };
            assert!((cm.mean_z_l - want_l).abs() < 0.1);
            assert!((cm.mean_z_r - want_r).abs() < 0.1);
        }
        // Summed over the two sides of index k the means are the column
        // sums (gamma_{k+1}, gamma_k).
        for k in 0..4usize {
            let (sum_l, sum_r) = stats
                .column_means_level1
                .iter()
                .filter(|cm| cm.index == k as u64)
                .fold((0.0, 0.0), |(l, r), cm| (l + cm.mean_z_l, r + cm.mean_z_r));
            assert!((sum_l - g.at(k + 1)).abs() < 0.15);
            assert!((sum_r - g.at(k)).abs() < 0.15);
        }
    }
}
