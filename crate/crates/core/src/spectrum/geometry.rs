//! Triangle-to-column geometry of the 45-degree rotated square.
//!
//! After rotating the unit square so its horizontal diagonal lies on the
//! x-axis, the level-n square with index pair `(i, j)` projects to the
//! x-interval `[i - j - 1, i - j + 1]` in units of `1 / (sqrt(2) M^n)`. Its
//! left (L) triangle covers the left half of that extent and its right (R)
//! triangle the right half, so each triangle falls in exactly one projection
//! column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangleType {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ColumnSide {
    /// Columns over `[0, sqrt(2)/2]`.
    Positive,
    /// Columns over `[-sqrt(2)/2, 0]`.
    Negative,
}

/// A level-n L- or R-triangle, identified by the digit-string indices of its
/// square in both factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleAddress {
    base: u32,
    level: u32,
    ttype: TriangleType,
    i: u64,
    j: u64,
}

impl TriangleAddress {
    pub fn new(base: u32, level: u32, ttype: TriangleType, i: u64, j: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::IndexOutOfRange {
                what: "triangle level",
                index: 0,
                limit: 1,
            });
        }
        let limit = (base as u128)
            .checked_pow(level)
            .filter(|&l| l <= u64::MAX as u128)
            .ok_or(Error::IndexOutOfRange {
                what: "triangle level width",
                index: level as u64,
                limit: 64,
            })?;
        for index in [i, j] {
            if index as u128 >= limit {
                return Err(Error::IndexOutOfRange {
                    what: "triangle index",
                    index,
                    limit: limit as u64,
                });
            }
        }
        Ok(TriangleAddress {
            base,
            level,
            ttype,
            i,
            j,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn triangle_type(&self) -> TriangleType {
        self.ttype
    }

    pub fn indices(&self) -> (u64, u64) {
        (self.i, self.j)
    }
}

/// A level-n projection column on one side of the origin, with index in
/// `[0, M^n)` (equivalently its base-M digit string).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnId {
    pub level: u32,
    pub side: ColumnSide,
    pub index: u64,
}

/// The unique column containing a triangle.
///
/// For an R-triangle the signed column value is `d = i - j`, for an
/// L-triangle `d = i - j - 1`; nonnegative `d` lands on the positive side
/// with index `d`, negative `d` on the negative side with index `d + M^n`.
pub fn column_of(t: &TriangleAddress) -> ColumnId {
    let span = (t.base as i128).pow(t.level);
    let d = t.i as i128
        - t.j as i128
        - match t.ttype {
            TriangleType::L => 1,
            TriangleType::R => 0,
        };
    if d >= 0 {
        ColumnId {
            level: t.level,
            side: ColumnSide::Positive,
            index: d as u64,
        }
    } else {
        ColumnId {
            level: t.level,
            side: ColumnSide::Negative,
            index: (d + span) as u64,
        }
    }
}
