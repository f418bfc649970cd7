//! Executable certificates for interval existence in the difference set.
//!
//! The base test: if every cyclic correlation `gamma_k` exceeds 1 the
//! difference set almost surely contains an interval; if two cyclically
//! consecutive values are both below 1 it almost surely contains none.
//! Strict inequalities throughout, so values exactly equal to 1 trigger
//! neither branch. When order 1 is inconclusive the same test applies to the
//! digit-lifted spec of every higher order, and independently a digit word
//! whose matrix product has Perron-Frobenius eigenvalue below 1 certifies
//! the no-interval side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{
    correlations, expectation_matrix, pf_eigenvalue, CantorSpec, ExpectationMatrix, GammaVector,
};

/// Default total word budget for escalation and spectral searches.
pub const DEFAULT_WORD_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The difference set almost surely contains an interval
    /// (conditional on both sets being nonempty).
    IntervalAs,
    /// The difference set almost surely contains no interval.
    NoIntervalAs,
    /// No certificate found within the budgets.
    Inconclusive,
}

/// Evidence backing a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// All order-n correlation values exceed 1; `min_gamma` is the smallest.
    AllGammaAboveOne { order: u32, min_gamma: f64 },
    /// Cyclically consecutive order-n values at `column` and `column + 1`
    /// are both below 1 (the successor of `M^n - 1` wraps to 0).
    ConsecutiveGammaBelowOne {
        order: u32,
        column: u64,
        values: (f64, f64),
    },
    /// A digit word whose matrix product has eigenvalue below 1.
    SpectralWitness { word: Vec<u32>, eigenvalue: f64 },
    /// Search space exhausted without a certificate.
    Exhausted { max_order: u32, max_word_len: u32 },
}

/// Outcome plus evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub certificate: Certificate,
}

/// Order-1 test on a correlation vector.
pub fn decide_order1(gamma: &GammaVector) -> Decision {
    let m = gamma.len();
    for k in 0..m {
        let (a, b) = (gamma.at(k), gamma.at(k + 1));
        if a < 1.0 && b < 1.0 {
            return Decision {
                verdict: Verdict::NoIntervalAs,
                certificate: Certificate::ConsecutiveGammaBelowOne {
                    order: 1,
                    column: k as u64,
                    values: (a, b),
                },
            };
        }
    }
    let min = gamma.min();
    if min > 1.0 {
        Decision {
            verdict: Verdict::IntervalAs,
            certificate: Certificate::AllGammaAboveOne {
                order: 1,
                min_gamma: min,
            },
        }
    } else {
        Decision {
            verdict: Verdict::Inconclusive,
            certificate: Certificate::Exhausted {
                max_order: 1,
                max_word_len: 0,
            },
        }
    }
}

/// What a full scan of one order produced.
enum OrderOutcome {
    AllAbove { min_gamma: f64 },
    PairBelow { column: u64, values: (f64, f64) },
    Neither,
}

/// Running state of an order scan. Correlation values are visited in
/// integer column order by a depth-first walk that shares prefix products,
/// so consecutive-pair detection only needs the previous value; the wrap
/// pair `(M^n - 1, 0)` is checked at the end.
struct OrderScanState {
    first: f64,
    prev: f64,
    min: f64,
    all_above: bool,
    seen_any: bool,
    next_column: u64,
    witness: Option<(u64, f64, f64)>,
}

impl OrderScanState {
    fn new() -> Self {
        OrderScanState {
            first: f64::NAN,
            prev: f64::NAN,
            min: f64::INFINITY,
            all_above: true,
            seen_any: false,
            next_column: 0,
            witness: None,
        }
    }

    /// Returns false once a consecutive pair below 1 is found, which aborts
    /// the rest of the scan; nothing else at this order can change the
    /// outcome then.
    fn visit(&mut self, gamma: f64) -> bool {
        if !self.seen_any {
            self.first = gamma;
            self.seen_any = true;
        } else if self.prev < 1.0 && gamma < 1.0 {
            self.witness = Some((self.next_column - 1, self.prev, gamma));
            return false;
        }
        self.min = self.min.min(gamma);
        self.all_above &= gamma > 1.0;
        self.prev = gamma;
        self.next_column += 1;
        true
    }
}

fn scan_recursive(
    mats: &[ExpectationMatrix],
    product: &ExpectationMatrix,
    depth_left: u32,
    state: &mut OrderScanState,
) -> bool {
    if depth_left == 0 {
        return state.visit(product.r_column_sum());
    }
    for mat in mats {
        if !scan_recursive(mats, &product.mul(mat), depth_left - 1, state) {
            return false;
        }
    }
    true
}

fn scan_order(mats: &[ExpectationMatrix], order: u32) -> OrderOutcome {
    let mut state = OrderScanState::new();
    scan_recursive(mats, &ExpectationMatrix::IDENTITY, order, &mut state);
    if let Some((column, a, b)) = state.witness {
        return OrderOutcome::PairBelow {
            column,
            values: (a, b),
        };
    }
    // Wrap pair between the last and first column.
    if state.prev < 1.0 && state.first < 1.0 {
        return OrderOutcome::PairBelow {
            column: state.next_column - 1,
            values: (state.prev, state.first),
        };
    }
    if state.all_above {
        OrderOutcome::AllAbove {
            min_gamma: state.min,
        }
    } else {
        OrderOutcome::Neither
    }
}

/// Applies the order-1 test to every lift order `1..=max_order`, returning
/// at the first order that certifies either side.
pub fn decide_escalating(spec: &CantorSpec, max_order: u32) -> Result<Decision> {
    decide_escalating_with_budget(spec, max_order, DEFAULT_WORD_BUDGET)
}

/// [`decide_escalating`] with an explicit cap on the total number of digit
/// words scanned across all orders.
pub fn decide_escalating_with_budget(
    spec: &CantorSpec,
    max_order: u32,
    word_budget: u128,
) -> Result<Decision> {
    require_supercritical(spec)?;
    if max_order == 0 {
        return Err(Error::Precondition("max_order must be >= 1".into()));
    }
    let mats = level_one_matrices(spec)?;
    let mut words_used: u128 = 0;
    for order in 1..=max_order {
        // The budget is consumed order by order, so cheap low orders still
        // decide before the cap can trip.
        words_used = words_used.saturating_add((spec.base() as u128).saturating_pow(order));
        if words_used > word_budget {
            return Err(Error::BudgetExceeded {
                what: format!("word enumeration at order {order}"),
                needed: words_used,
                cap: word_budget,
            });
        }
        match scan_order(&mats, order) {
            OrderOutcome::AllAbove { min_gamma } => {
                return Ok(Decision {
                    verdict: Verdict::IntervalAs,
                    certificate: Certificate::AllGammaAboveOne { order, min_gamma },
                });
            }
            OrderOutcome::PairBelow { column, values } => {
                return Ok(Decision {
                    verdict: Verdict::NoIntervalAs,
                    certificate: Certificate::ConsecutiveGammaBelowOne {
                        order,
                        column,
                        values,
                    },
                });
            }
            OrderOutcome::Neither => {}
        }
    }
    Ok(Decision {
        verdict: Verdict::Inconclusive,
        certificate: Certificate::Exhausted {
            max_order,
            max_word_len: 0,
        },
    })
}

/// A digit word whose matrix product contracts: its eigenvalue is below 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralWitness {
    pub word: Vec<u32>,
    pub eigenvalue: f64,
}

/// Searches digit words of length `1..=max_word_len` depth-first (sharing
/// prefix products) for a product with eigenvalue below 1; the first word
/// in preorder wins, which is also the lexicographically smallest witness.
/// Such a word certifies the no-interval side.
pub fn spectral_certificate(
    spec: &CantorSpec,
    max_word_len: u32,
) -> Result<Option<SpectralWitness>> {
    spectral_certificate_with_budget(spec, max_word_len, DEFAULT_WORD_BUDGET)
}

pub fn spectral_certificate_with_budget(
    spec: &CantorSpec,
    max_word_len: u32,
    word_budget: u128,
) -> Result<Option<SpectralWitness>> {
    require_supercritical(spec)?;
    if max_word_len == 0 {
        return Err(Error::Precondition("max_word_len must be >= 1".into()));
    }
    check_word_budget(spec.base(), max_word_len, word_budget)?;
    let mats = level_one_matrices(spec)?;
    let mut word = Vec::with_capacity(max_word_len as usize);
    Ok(spectral_dfs(
        &mats,
        &ExpectationMatrix::IDENTITY,
        max_word_len,
        &mut word,
    ))
}

fn spectral_dfs(
    mats: &[ExpectationMatrix],
    product: &ExpectationMatrix,
    depth_left: u32,
    word: &mut Vec<u32>,
) -> Option<SpectralWitness> {
    if depth_left == 0 {
        return None;
    }
    for (digit, mat) in mats.iter().enumerate() {
        let extended = product.mul(mat);
        word.push(digit as u32);
        let eigenvalue =
            pf_eigenvalue(&extended).expect("products of nonnegative matrices are nonnegative");
        if eigenvalue < 1.0 {
            return Some(SpectralWitness {
                word: word.clone(),
                eigenvalue,
            });
        }
        if let Some(found) = spectral_dfs(mats, &extended, depth_left - 1, word) {
            return Some(found);
        }
        word.pop();
    }
    None
}

/// Lower bound for the probability that the leftmost level-2 column starts a
/// disjoint L/R pair, from adjacent positive digits: the best pair gives
/// `p_i p_{i+1}^3 q_i^2 q_{i+1}^2`, which is `p_i^3 p_{i+1}^5` in one-vector
/// mode. Requires every correlation value to exceed 1, which guarantees an
/// adjacent positive pair exists.
pub fn delta_start_lower_bound(spec: &CantorSpec) -> Result<f64> {
    let gamma = correlations(spec);
    // Negated so NaN fails the precondition too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(gamma.min() > 1.0) {
        return Err(Error::Precondition(format!(
            "delta-pair start bound requires every gamma value > 1, but the minimum is {}",
            gamma.min()
        )));
    }
    let p = spec.p();
    let q = spec.q();
    let mut best: Option<f64> = None;
    for i in 0..p.len() - 1 {
        let value = p[i] * p[i + 1].powi(3) * q[i] * q[i] * q[i + 1] * q[i + 1];
        if value > 0.0 {
            best = Some(best.map_or(value, |b: f64| b.max(value)));
        }
    }
    best.ok_or_else(|| {
        Error::Inconsistency("no adjacent pair of positive probabilities despite gamma > 1".into())
    })
}

/// One entry of a parametrised family: a literal or the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyEntry {
    Constant(f64),
    Parameter,
}

/// A probability vector template over one parameter, e.g. `1,0,1,rho`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTemplate {
    entries: Vec<FamilyEntry>,
}

impl FamilyTemplate {
    pub fn new(entries: Vec<FamilyEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidSpec(
                "family template needs at least 2 entries".into(),
            ));
        }
        if !entries.iter().any(|e| matches!(e, FamilyEntry::Parameter)) {
            return Err(Error::InvalidSpec(
                "family template contains no parameter entry".into(),
            ));
        }
        Ok(FamilyTemplate { entries })
    }

    /// Parses entries like `1,0,1,rho`; the bare symbol `rho` marks the
    /// parameter slot.
    pub fn parse(csv: &str) -> Result<Self> {
        let entries = csv
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                if tok == "rho" {
                    Ok(FamilyEntry::Parameter)
                } else {
                    tok.parse::<f64>().map(FamilyEntry::Constant).map_err(|_| {
                        Error::InvalidSpec(format!(
                            "family entry {tok:?} is neither a number nor 'rho'"
                        ))
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn instantiate(&self, rho: f64) -> Result<CantorSpec> {
        let p = self
            .entries
            .iter()
            .map(|e| match e {
                FamilyEntry::Constant(c) => *c,
                FamilyEntry::Parameter => rho,
            })
            .collect();
        CantorSpec::new(p)
    }
}

/// Budgets for one certification attempt inside the bracket search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketBudget {
    pub max_order: u32,
    pub max_word_len: u32,
    pub word_budget: u128,
}

impl Default for BracketBudget {
    fn default() -> Self {
        BracketBudget {
            max_order: 10,
            max_word_len: 6,
            word_budget: DEFAULT_WORD_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEffort {
    pub max_order: u32,
    pub max_word_len: u32,
    pub evaluations: u32,
}

/// Certified enclosure of the critical parameter: `lo` is the largest value
/// certified no-interval, `hi` the smallest certified interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub lo_certificate: Certificate,
    pub hi_certificate: Certificate,
    pub effort: BracketEffort,
    /// The verdict is assumed monotone in the parameter; this is an
    /// assumption of the search, not a theorem.
    pub assumption: String,
}

enum Certified {
    No(Certificate),
    Yes(Certificate),
    Neither,
}

fn certify(family: &FamilyTemplate, rho: f64, budget: &BracketBudget) -> Result<Certified> {
    let spec = family.instantiate(rho)?;
    if !spec.is_supercritical() {
        return Ok(Certified::Neither);
    }
    let decision = decide_escalating_with_budget(&spec, budget.max_order, budget.word_budget)?;
    match decision.verdict {
        Verdict::IntervalAs => return Ok(Certified::Yes(decision.certificate)),
        Verdict::NoIntervalAs => return Ok(Certified::No(decision.certificate)),
        Verdict::Inconclusive => {}
    }
    if let Some(w) =
        spectral_certificate_with_budget(&spec, budget.max_word_len, budget.word_budget)?
    {
        return Ok(Certified::No(Certificate::SpectralWitness {
            word: w.word,
            eigenvalue: w.eigenvalue,
        }));
    }
    Ok(Certified::Neither)
}

/// Brackets the critical parameter of a one-parameter family by bisecting
/// each certification boundary separately: `lo` grows toward the largest
/// parameter still certifiable no-interval, `hi` shrinks toward the smallest
/// certifiable interval. Monotonicity of the true verdict in the parameter
/// is assumed, not proven.
pub fn critical_bracket(
    family: &FamilyTemplate,
    lo0: f64,
    hi0: f64,
    tol: f64,
    budget: &BracketBudget,
) -> Result<Bracket> {
    // Negated comparisons so NaN arguments fail the preconditions too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(lo0 < hi0) {
        return Err(Error::Precondition(format!(
            "bracket endpoints must satisfy lo < hi, got {lo0} >= {hi0}"
        )));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let mut evaluations = 0u32;
    let mut run = |rho: f64| -> Result<Certified> {
        evaluations += 1;
        certify(family, rho, budget)
    };

    let lo_cert = match run(lo0)? {
        Certified::No(c) => c,
        _ => {
            return Err(Error::NotCertifiable(format!(
                "lower endpoint {lo0} is not certifiable as no-interval within the budgets"
            )))
        }
    };
    let hi_cert = match run(hi0)? {
        Certified::Yes(c) => c,
        _ => {
            return Err(Error::NotCertifiable(format!(
                "upper endpoint {hi0} is not certifiable as interval within the budgets"
            )))
        }
    };

    // Boundary of no-interval certification.
    let (mut lo, mut lo_certificate) = (lo0, lo_cert);
    let mut upper = hi0;
    while upper - lo > tol {
        let mid = 0.5 * (lo + upper);
        match run(mid)? {
            Certified::No(c) => {
                lo = mid;
                lo_certificate = c;
            }
            _ => upper = mid,
        }
    }

    // Boundary of interval certification.
    let (mut hi, mut hi_certificate) = (hi0, hi_cert);
    let mut lower = lo0;
    while hi - lower > tol {
        let mid = 0.5 * (lower + hi);
        match run(mid)? {
            Certified::Yes(c) => {
                hi = mid;
                hi_certificate = c;
            }
            _ => lower = mid,
        }
    }

    Ok(Bracket {
        lo,
        hi,
        lo_certificate,
        hi_certificate,
        effort: BracketEffort {
            max_order: budget.max_order,
            max_word_len: budget.max_word_len,
            evaluations,
        },
        assumption: "assumed-monotone".to_string(),
    })
}

fn level_one_matrices(spec: &CantorSpec) -> Result<Vec<ExpectationMatrix>> {
    (0..spec.base())
        .map(|k| expectation_matrix(spec, k))
        .collect()
}

fn require_supercritical(spec: &CantorSpec) -> Result<()> {
    if spec.is_supercritical() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "spec is not supercritical (sum of probabilities must exceed 1 on both sides)".into(),
        ))
    }
}

fn check_word_budget(base: u32, max_len: u32, budget: u128) -> Result<()> {
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..max_len {
        power = power.saturating_mul(base as u128);
        total = total.saturating_add(power);
        if total > budget {
            return Err(Error::BudgetExceeded {
                what: "word enumeration".into(),
                needed: total,
                cap: budget,
            });
        }
    }
    Ok(())
}
