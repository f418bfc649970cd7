//! Problem inputs and the correlation/expectation machinery.
//!
//! A [`CantorSpec`] is a base `M >= 2` together with a selection-probability
//! vector `p` (and optionally a second vector `q` when the two random sets
//! are generated with different probabilities). Everything else in the crate
//! is a function of such a spec: the cyclic correlations `gamma_k`, the 2x2
//! expectation matrices per column digit, their products over digit words,
//! and the digit-product lift to base `M^n`.

mod geometry;
mod matrix;

pub use geometry::{column_of, ColumnId, ColumnSide, TriangleAddress, TriangleType};
pub use matrix::{
    digits_of_index, expectation_matrix, gamma_at, pf_eigenvalue, word_matrix, ExpectationMatrix,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the vector length produced by [`higher_order`].
pub const DEFAULT_LIFT_CAP: usize = 1_000_000;

/// Base `M` plus one or two selection-probability vectors; the entire
/// problem input.
///
/// `p` drives the first random set, `q` the second; `q = None` means both
/// sets use `p`. Entries may be 0 or 1, so deterministic Cantor sets are
/// specs too.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CantorSpec {
    #[serde(rename = "M")]
    m: u32,
    p: Vec<f64>,
    q: Option<Vec<f64>>,
}

impl CantorSpec {
    /// One-vector spec; the base is the vector length.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        Self::with_cross(p, None)
    }

    /// Two-vector spec: `p` for the first set, `q` for the second.
    pub fn with_cross(p: Vec<f64>, q: Option<Vec<f64>>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 probabilities, got {}",
                p.len()
            )));
        }
        validate_probs("p", &p)?;
        if let Some(q) = &q {
            if q.len() != p.len() {
                return Err(Error::InvalidSpec(format!(
                    "q has length {} but p has length {}",
                    q.len(),
                    p.len()
                )));
            }
            validate_probs("q", q)?;
        }
        Ok(CantorSpec {
            m: p.len() as u32,
            p,
            q,
        })
    }

    /// Parses comma-separated probabilities, e.g. `"1,0,1,0.3"`; the base is
    /// inferred from the number of entries.
    pub fn from_csv(p_csv: &str, q_csv: Option<&str>) -> Result<Self> {
        let p = parse_csv(p_csv)?;
        let q = q_csv.map(parse_csv).transpose()?;
        Self::with_cross(p, q)
    }

    pub fn base(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// The second vector, falling back to `p` in one-vector mode.
    pub fn q(&self) -> &[f64] {
        self.q.as_deref().unwrap_or(&self.p)
    }

    /// The second vector only if it was given explicitly.
    pub fn q_explicit(&self) -> Option<&[f64]> {
        self.q.as_deref()
    }

    /// Nonemptiness condition: both branching processes are supercritical.
    pub fn is_supercritical(&self) -> bool {
        self.p.iter().sum::<f64>() > 1.0 && self.q().iter().sum::<f64>() > 1.0
    }

    /// True when every entry of `p` (and `q`) is exactly 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        let zero_one = |v: &[f64]| v.iter().all(|&x| x == 0.0 || x == 1.0);
        zero_one(&self.p) && self.q.as_deref().is_none_or(zero_one)
    }
}

impl<'de> Deserialize<'de> for CantorSpec {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "M")]
            m: u32,
            p: Vec<f64>,
            #[serde(default)]
            q: Option<Vec<f64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.m as usize != raw.p.len() {
            return Err(serde::de::Error::custom(format!(
                "M = {} does not match p length {}",
                raw.m,
                raw.p.len()
            )));
        }
        CantorSpec::with_cross(raw.p, raw.q).map_err(serde::de::Error::custom)
    }
}

fn validate_probs(name: &str, v: &[f64]) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidSpec(format!(
                "{name}[{i}] = {x} is not in [0, 1]"
            )));
        }
    }
    Ok(())
}

fn parse_csv(csv: &str) -> Result<Vec<f64>> {
    csv.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("cannot parse probability {tok:?}")))
        })
        .collect()
}

/// Cyclic correlation values `gamma_0 .. gamma_{M-1}`; the index wraps, so
/// `gamma_M = gamma_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaVector {
    values: Vec<f64>,
}

impl GammaVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at index `k`, taken cyclically.
    pub fn at(&self, k: usize) -> f64 {
        self.values[k % self.values.len()]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Cyclic cross-correlations `gamma_k = sum_j q_j p_{(j+k) mod M}`.
///
/// In one-vector mode `q = p`, which reduces to the autocorrelations.
pub fn correlations(spec: &CantorSpec) -> GammaVector {
    let m = spec.base() as usize;
    let p = spec.p();
    let q = spec.q();
    let values = (0..m)
        .map(|k| (0..m).map(|j| q[j] * p[(j + k) % m]).sum())
        .collect();
    GammaVector { values }
}

/// Digit-product lift of a spec to base `M^n`: the entry whose base-M digits
/// are `i_1 .. i_n` equals `p_{i_1} * ... * p_{i_n}`, applied to `p` and `q`
/// independently. The lifted set has the same distribution as the original,
/// which is what makes escalation over orders sound.
pub fn higher_order(spec: &CantorSpec, order: u32) -> Result<CantorSpec> {
    higher_order_with_cap(spec, order, DEFAULT_LIFT_CAP)
}

/// [`higher_order`] with an explicit cap on the lifted vector length, to
/// fail fast instead of exhausting memory.
pub fn higher_order_with_cap(spec: &CantorSpec, order: u32, cap: usize) -> Result<CantorSpec> {
    if order == 0 {
        return Err(Error::Precondition("lift order must be >= 1".into()));
    }
    let m = spec.base() as u128;
    let len = m
        .checked_pow(order)
        .filter(|&l| l <= usize::MAX as u128)
        .ok_or(Error::BudgetExceeded {
            what: format!("higher-order vector length at order {order}"),
            needed: u128::MAX,
            cap: cap as u128,
        })?;
    if len > cap as u128 {
        return Err(Error::BudgetExceeded {
            what: format!("higher-order vector length at order {order}"),
            needed: len,
            cap: cap as u128,
        });
    }
    let lift = |v: &[f64]| {
        let mut out = vec![1.0f64];
        for _ in 0..order {
            let mut next = Vec::with_capacity(out.len() * v.len());
            for &a in &out {
                for &x in v {
                    next.push(a * x);
                }
            }
            out = next;
        }
        out
    };
    let p = lift(spec.p());
    let q = spec.q_explicit().map(lift);
    CantorSpec::with_cross(p, q)
}
