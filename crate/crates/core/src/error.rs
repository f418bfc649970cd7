use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A probability vector failed validation.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A digit was outside `0..M`.
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u32 },

    /// An index was outside its permitted range.
    #[error("index {index} out of range for {what} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: u64,
        limit: u64,
    },

    /// A matrix entry was negative where a nonnegative one is required.
    #[error("negative matrix entry {0}")]
    NegativeEntry(f64),

    /// A configured enumeration or memory budget would be exceeded.
    #[error("budget exceeded for {what}: needs {needed}, cap {cap}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        cap: u128,
    },

    /// An operation's stated precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Pairing input was malformed (parity, cardinality or duplicates).
    #[error("malformed pairing input: {0}")]
    MalformedPairing(String),

    /// A requested sample level is not present.
    #[error("sample has no level {0}")]
    LevelMissing(u32),

    /// A bracket endpoint could not be certified within the budgets.
    #[error("bracket endpoint not certifiable: {0}")]
    NotCertifiable(String),

    /// Mutually contradictory results that would falsify either the
    /// implementation or a verified claim.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
