//! Expectation matrices per column digit and their word products.
//!
//! For a column digit `k` the 2x2 matrix holds the expected numbers of
//! level-1 offspring triangles per column, with rows indexed by the source
//! triangle type (L, R) and columns by the offspring type (L, R). Rows
//! of the matrix describe the negative-side column `C_k^-` (source L) and
//! the positive-side column `C_k` (source R). The matrices multiply along
//! digit words, which is what every higher-order certificate relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::CantorSpec;

/// 2x2 nonnegative matrix of expected offspring-triangle counts.
///
/// Field names follow (source, offspring) type order: `lr` is the expected
/// number of R-offspring of an L source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationMatrix {
    pub ll: f64,
    pub lr: f64,
    pub rl: f64,
    pub rr: f64,
}

impl ExpectationMatrix {
    pub const IDENTITY: Self = ExpectationMatrix {
        ll: 1.0,
        lr: 0.0,
        rl: 0.0,
        rr: 1.0,
    };

    pub fn new(ll: f64, lr: f64, rl: f64, rr: f64) -> Self {
        ExpectationMatrix { ll, lr, rl, rr }
    }

    /// Ordinary matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        ExpectationMatrix {
            ll: self.ll * other.ll + self.lr * other.rl,
            lr: self.ll * other.lr + self.lr * other.rr,
            rl: self.rl * other.ll + self.rr * other.rl,
            rr: self.rl * other.lr + self.rr * other.rr,
        }
    }

    /// Column sums `(L-offspring, R-offspring)`. For a level-1 matrix of
    /// column `k` these equal `(gamma_{k+1}, gamma_k)`.
    pub fn column_sums(&self) -> (f64, f64) {
        (self.ll + self.rl, self.lr + self.rr)
    }

    /// Sum of the R-offspring column; the expected number of R-triangles.
    pub fn r_column_sum(&self) -> f64 {
        self.lr + self.rr
    }

    /// 1-norm (sum of absolute entries); Markov upper bound for the
    /// probability that the column is still occupied.
    pub fn one_norm(&self) -> f64 {
        self.ll.abs() + self.lr.abs() + self.rl.abs() + self.rr.abs()
    }

    /// The matrix with both the row and column type order reversed
    /// (L and R interchanged).
    pub fn type_swapped(&self) -> Self {
        ExpectationMatrix {
            ll: self.rr,
            lr: self.rl,
            rl: self.lr,
            rr: self.ll,
        }
    }

    fn entries(&self) -> [f64; 4] {
        [self.ll, self.lr, self.rl, self.rr]
    }
}

/// Level-1 expectation matrix of column digit `k`.
///
/// Entries are plain-integer (non-wrapping) difference sums over digit pairs
/// `(i, j)`: the L-triangle of the square `(i, j)` sits in the signed column
/// `i - j - 1` and the R-triangle in `i - j`, so each entry collects the
/// `p_i q_j` mass of the pairs that land in the requested column and side.
pub fn expectation_matrix(spec: &CantorSpec, k: u32) -> Result<ExpectationMatrix> {
    let m = spec.base();
    if k >= m {
        return Err(Error::DigitOutOfRange {
            digit: k as u64,
            base: m,
        });
    }
    let m = m as i64;
    let k = k as i64;
    let p = spec.p();
    let q = spec.q();
    let sum_for = |j_minus_i: i64| -> f64 {
        let mut acc = 0.0;
        for i in 0..m {
            let j = i + j_minus_i;
            if (0..m).contains(&j) {
                acc += p[i as usize] * q[j as usize];
            }
        }
        acc
    };
    Ok(ExpectationMatrix {
        ll: sum_for(m - k - 1),
        lr: sum_for(m - k),
        rl: sum_for(-(k + 1)),
        rr: sum_for(-k),
    })
}

/// Left-to-right product of level-1 matrices over a digit word; the empty
/// word yields the identity.
pub fn word_matrix(spec: &CantorSpec, word: &[u32]) -> Result<ExpectationMatrix> {
    let mut acc = ExpectationMatrix::IDENTITY;
    for &digit in word {
        acc = acc.mul(&expectation_matrix(spec, digit)?);
    }
    Ok(acc)
}

/// Largest eigenvalue of a nonnegative 2x2 matrix, via the closed form
/// `(trace + sqrt(trace^2 - 4 det)) / 2`. Always real for nonnegative
/// matrices since the discriminant equals `(ll - rr)^2 + 4 lr rl >= 0`.
pub fn pf_eigenvalue(m: &ExpectationMatrix) -> Result<f64> {
    for e in m.entries() {
        if e < 0.0 {
            return Err(Error::NegativeEntry(e));
        }
    }
    let trace = m.ll + m.rr;
    let disc = (m.ll - m.rr) * (m.ll - m.rr) + 4.0 * m.lr * m.rl;
    Ok(0.5 * (trace + disc.sqrt()))
}

/// Base-M digits of `k`, most significant first, padded to `order` digits.
pub fn digits_of_index(k: u64, base: u32, order: u32) -> Vec<u32> {
    let mut digits = vec![0u32; order as usize];
    let mut rest = k;
    for slot in digits.iter_mut().rev() {
        *slot = (rest % base as u64) as u32;
        rest /= base as u64;
    }
    digits
}

/// Order-n correlation value `gamma^(n)_k`, computed as the R-column sum of
/// the word matrix over the base-M digits of `k`.
///
/// This equals the cyclic correlation of the order-n lifted vectors at index
/// `k` without ever materialising the lifted vectors, so it works at orders
/// far beyond the lift cap.
pub fn gamma_at(spec: &CantorSpec, order: u32, k: u64) -> Result<f64> {
    let limit = (spec.base() as u128)
        .checked_pow(order)
        .unwrap_or(u128::MAX);
    if order == 0 || (k as u128) >= limit {
        return Err(Error::IndexOutOfRange {
            what: "order-n column index",
            index: k,
            limit: limit.min(u64::MAX as u128) as u64,
        });
    }
    let word = digits_of_index(k, spec.base(), order);
    Ok(word_matrix(spec, &word)?.r_column_sum())
}
