use thiserror::Error;

use crate::verify::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: String, actual: String },

    #[error("{player} is out of range for a market with {sellers} sellers and {buyers} buyers")]
    PlayerOutOfRange {
        player: String,
        sellers: usize,
        buyers: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid configuration: {0}")]
    Configuration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("allocation is not monotone ({} violations)", .0.len())]
    NotMonotone(Vec<Violation>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
