//! Double-auction mechanisms and exhaustive verification of their robustness.
//!
//! A mechanism maps a valuation profile `v = (s, b)` to allocations and
//! transfers. The [`verify`] checkers scan a finite [`Grid`] of profiles for
//! violations of incentive compatibility, individual rationality, budget
//! balance, non-wastefulness, the auxiliary common-price, worst-type and
//! non-bossiness assumptions, and the single-price structure that those
//! properties force. [`search`] mines profitable misreports.
//!
//! All arithmetic is exact ([`Amount`] is a rational), so equality checks
//! such as "every trader faces the same price" never suffer rounding.

pub mod amount;
pub mod error;
pub mod mechanism;
pub mod mechanisms;
pub mod model;
pub mod search;
pub mod verify;

pub use amount::{dec, Amount};
pub use error::{Error, Result};
pub use mechanism::{FnMechanism, Mechanism};
pub use model::{
    payoff, payoff_buyer, payoff_seller, trader_set, MarketShape, Outcome, Player, Side,
    TraderSet, ValuationProfile,
};
pub use search::{best_deviation, mine_ic_failures, Deviation};
pub use verify::{Check, Grid, Property, Violation};
