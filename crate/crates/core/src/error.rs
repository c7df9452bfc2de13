use thiserror::Error;

/// Errors raised by the lattice, measure and integral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("enumeration budget exceeded: {work} terms requested, limit {limit}")]
    BudgetExceeded { work: u128, limit: u128 },
    #[error("atom family has no atoms of order {0}")]
    UnregisteredOrder(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

/// Largest number of tuples any single enumeration may visit.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

pub(crate) fn check_budget(base: usize, exponent: usize) -> Result<()> {
    let work = (base as u128).checked_pow(exponent as u32).unwrap_or(u128::MAX);
    if work > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { work, limit: ENUMERATION_BUDGET });
    }
    Ok(())
}
