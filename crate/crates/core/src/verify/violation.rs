use std::fmt;

use crate::amount::Amount;
use crate::model::{Player, TraderSet, ValuationProfile};

/// The property a violation witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Ic,
    Ir,
    Bb,
    Nw,
    CommonPrice,
    WorstType,
    NonBossy,
    Monotone,
    Envelope,
    Prop1Structure,
    Prop2Structure,
    ValueRespecting,
}

impl Property {
    pub fn code(&self) -> &'static str {
        match self {
            Property::Ic => "IC",
            Property::Ir => "IR",
            Property::Bb => "BB",
            Property::Nw => "NW",
            Property::CommonPrice => "A1_common_price",
            Property::WorstType => "A2_worst_type",
            Property::NonBossy => "A3_nonbossy",
            Property::Monotone => "L1_monotone",
            Property::Envelope => "L1_envelope",
            Property::Prop1Structure => "P1_struct",
            Property::Prop2Structure => "P2_struct",
            Property::ValueRespecting => "value_respecting",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Numeric evidence attached to a violation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Evidence {
    /// Truthful payoff and the payoff from reporting `deviation` instead.
    Payoffs { truthful: Amount, deviating: Amount },
    NegativePayoff { payoff: Amount },
    Budget { receipts: Amount, payments: Amount },
    Volume { sold: usize, bought: usize },
    /// Two traders on the same profile with different transfers.
    DistinctTransfers {
        first: Player,
        first_amount: Amount,
        second: Player,
        second_amount: Amount,
    },
    WorstTypePayoff { payoff: Amount },
    /// The deviating player's own allocation and transfer are unchanged but
    /// `affected`'s transfer moves.
    BossyChange {
        affected: Player,
        before: Amount,
        after: Amount,
    },
    /// Allocation at the profile and at the higher report `deviation`.
    Allocation { at_lower: bool, at_higher: bool },
    /// Payoff against the Riemann-sum estimate `integral + worst_payoff`.
    Envelope {
        payoff: Amount,
        integral: Amount,
        worst_payoff: Amount,
    },
    NonTraderTransfer { amount: Amount },
    PriceBound { valuation: Amount, price: Amount },
    /// Moving one trader's valuation to `deviation` keeps the trader set but
    /// changes the price.
    PriceMoved { before: Amount, after: Amount },
    /// The same trader set clears at a different price than at `reference`.
    PriceByTraderSet {
        traders: TraderSet,
        reference: ValuationProfile,
        reference_price: Amount,
        price: Amount,
    },
    /// A non-trader outranks `trader` without being excluded by the price or
    /// by rationing.
    Priority {
        trader: Player,
        trader_valuation: Amount,
        valuation: Amount,
    },
}

impl Evidence {
    /// Flat `(key, value)` rendering with one-based player labels.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let s = |a: &Amount| a.to_string();
        match self {
            Evidence::Payoffs { truthful, deviating } => vec![
                ("truthful_payoff", s(truthful)),
                ("deviation_payoff", s(deviating)),
                ("gain", s(&(*deviating - *truthful))),
            ],
            Evidence::NegativePayoff { payoff } => vec![("payoff", s(payoff))],
            Evidence::Budget { receipts, payments } => {
                vec![("total_receipts", s(receipts)), ("total_payments", s(payments))]
            }
            Evidence::Volume { sold, bought } => vec![
                ("clause", "i".into()),
                ("units_sold", sold.to_string()),
                ("units_bought", bought.to_string()),
            ],
            Evidence::DistinctTransfers {
                first,
                first_amount,
                second,
                second_amount,
            } => vec![
                ("clause", "ii".into()),
                ("first", first.to_string()),
                ("first_transfer", s(first_amount)),
                ("second", second.to_string()),
                ("second_transfer", s(second_amount)),
            ],
            Evidence::WorstTypePayoff { payoff } => vec![("payoff", s(payoff))],
            Evidence::BossyChange {
                affected,
                before,
                after,
            } => vec![
                ("affected", affected.to_string()),
                ("transfer_before", s(before)),
                ("transfer_after", s(after)),
            ],
            Evidence::Allocation {
                at_lower,
                at_higher,
            } => vec![
                ("trades_at_lower", (*at_lower as u8).to_string()),
                ("trades_at_higher", (*at_higher as u8).to_string()),
            ],
            Evidence::Envelope {
                payoff,
                integral,
                worst_payoff,
            } => vec![
                ("payoff", s(payoff)),
                ("integral", s(integral)),
                ("worst_type_payoff", s(worst_payoff)),
                ("gap", s(&(*payoff - *integral - *worst_payoff).abs())),
            ],
            Evidence::NonTraderTransfer { amount } => {
                vec![("clause", "iii".into()), ("transfer", s(amount))]
            }
            Evidence::PriceBound { valuation, price } => vec![
                ("clause", "iv".into()),
                ("valuation", s(valuation)),
                ("price", s(price)),
            ],
            Evidence::PriceMoved { before, after } => vec![
                ("clause", "ii'".into()),
                ("price", s(before)),
                ("price_after", s(after)),
            ],
            Evidence::PriceByTraderSet {
                traders,
                reference,
                reference_price,
                price,
            } => vec![
                ("traders", traders.to_string()),
                ("reference_profile", reference.to_string()),
                ("reference_price", s(reference_price)),
                ("price", s(price)),
            ],
            Evidence::Priority {
                trader,
                trader_valuation,
                valuation,
            } => vec![
                ("outranked_trader", trader.to_string()),
                ("trader_valuation", s(trader_valuation)),
                ("valuation", s(valuation)),
            ],
        }
    }
}

/// A replayable witness that a mechanism fails a property on a grid.
///
/// Field order fixes the canonical sort: profile, player, deviation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub profile: ValuationProfile,
    pub player: Option<Player>,
    pub deviation: Option<Amount>,
    pub property: Property,
    pub evidence: Evidence,
}

impl Violation {
    pub fn new(property: Property, profile: &ValuationProfile, evidence: Evidence) -> Self {
        Violation {
            profile: profile.clone(),
            player: None,
            deviation: None,
            property,
            evidence,
        }
    }

    pub fn by(mut self, player: Player) -> Self {
        self.player = Some(player);
        self
    }

    pub fn reporting(mut self, value: Amount) -> Self {
        self.deviation = Some(value);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.property, self.profile)?;
        if let Some(p) = self.player {
            write!(f, ", {p}")?;
        }
        if let Some(d) = self.deviation {
            write!(f, " reporting {d}")?;
        }
        for (k, v) in self.evidence.fields() {
            write!(f, ", {k}={v}")?;
        }
        Ok(())
    }
}
