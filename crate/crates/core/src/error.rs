use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position is not a finite number")]
    NonFinite,
    #[error("a profile needs at least 2 vendors, got {0}")]
    TooFewVendors(usize),
    #[error("vendor index {index} out of range for {n} vendors")]
    VendorIndex { index: usize, n: usize },
    #[error("integration resolution must be positive")]
    ZeroResolution,
    #[error("grid denominator must be at least {min}, got {got}")]
    GridTooSmall { got: u64, min: u64 },
    #[error("{kind:?} mode cannot be used with this scalar type")]
    ModeMismatch { kind: crate::geometry::ModeKind },
    #[error("enumeration needs {candidates} candidates, budget is {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
}
