//! Decides whether the algebraic difference `F2 - F1` of two independent
//! random M-adic Cantor sets almost surely contains an interval, and backs
//! every verdict with a checkable certificate.
//!
//! The crate is organised around the objects of the problem:
//!
//! - [`spectrum`] — problem inputs ([`CantorSpec`]), cyclic auto/cross
//!   correlations, 2x2 expectation matrices and their word products,
//!   Perron-Frobenius eigenvalues, higher-order digit lifts, and the exact
//!   triangle-to-column geometry of the 45-degree rotated picture.
//! - [`decision`] — executable certificates: the order-1 correlation test,
//!   higher-order escalation, spectral (eigenvalue) witnesses, the critical
//!   parameter bracket, and the delta-pair start bound.
//! - [`deterministic`] — the complete decision procedure for 0-1 vectors via
//!   reductions of the expectation matrices and the attractor of the set map
//!   `G`, plus exhaustive consistency scans.
//! - [`simulate`] — seeded Monte Carlo realisation of the labeled-tree
//!   construction, used to validate expectations, survival and dimension.
//! - [`pairing`] — delta-pair combinatorics: maximum disjoint pair extraction
//!   from a column and the constructive three-color pairing with a checker.

pub mod decision;
pub mod deterministic;
mod error;
pub mod pairing;
pub mod simulate;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::CantorSpec;
