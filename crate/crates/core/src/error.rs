use thiserror::Error;

use crate::game::ValidationReport;
use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid policy: {0}")]
    Policy(String),

    #[error("invalid game:\n{0}")]
    InvalidGame(ValidationReport),

    #[error("{what} exceeds guard: {actual} > {limit}")]
    Guard {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("dominance gap iota must be strictly positive and finite, got {0}")]
    InvalidIota(f64),

    /// The attacker LP came back non-optimal, so the victim value it was fed
    /// was not optimal for the stage game.
    #[error("solver inconsistency: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Lp(#[from] LpError),
}
