//! Per-profile predicates. Each takes already-evaluated outcomes, so the grid
//! scans and witness replay share one definition of every property.

use crate::amount::Amount;
use crate::model::{Outcome, Player, Side, TraderSet, ValuationProfile};
use crate::verify::violation::{Evidence, Property, Violation};

/// `player` at `v` gains by reporting `report`; `deviated` is the outcome at
/// `(report, v_-k)`.
pub fn ic(
    v: &ValuationProfile,
    player: Player,
    report: Amount,
    truthful: &Outcome,
    deviated: &Outcome,
) -> Option<Violation> {
    let value = v.get(player);
    let u = truthful.payoff_with(player, value);
    let u_dev = deviated.payoff_with(player, value);
    (u_dev > u).then(|| {
        Violation::new(
            Property::Ic,
            v,
            Evidence::Payoffs {
                truthful: u,
                deviating: u_dev,
            },
        )
        .by(player)
        .reporting(report)
    })
}

pub fn ir(v: &ValuationProfile, out: &Outcome) -> Vec<Violation> {
    v.shape()
        .iter_players()
        .filter_map(|p| {
            let payoff = out.payoff(v, p);
            payoff
                .is_negative()
                .then(|| Violation::new(Property::Ir, v, Evidence::NegativePayoff { payoff }).by(p))
        })
        .collect()
}

pub fn bb(v: &ValuationProfile, out: &Outcome) -> Option<Violation> {
    let receipts = out.total_receipts();
    let payments = out.total_payments();
    (receipts != payments)
        .then(|| Violation::new(Property::Bb, v, Evidence::Budget { receipts, payments }))
}

pub fn nw(v: &ValuationProfile, out: &Outcome) -> Option<Violation> {
    volume(Property::Nw, v, out)
}

fn volume(property: Property, v: &ValuationProfile, out: &Outcome) -> Option<Violation> {
    let sold = out.units_sold();
    let bought = out.units_bought();
    (sold != bought).then(|| Violation::new(property, v, Evidence::Volume { sold, bought }))
}

/// First pair of traders on `side` whose transfers differ.
fn distinct_on_side(out: &Outcome, side: Side) -> Option<Evidence> {
    let traders: Vec<Player> = match side {
        Side::Seller => (0..out.seller_trades.len())
            .filter(|&i| out.seller_trades[i])
            .map(Player::Seller)
            .collect(),
        Side::Buyer => (0..out.buyer_trades.len())
            .filter(|&j| out.buyer_trades[j])
            .map(Player::Buyer)
            .collect(),
    };
    distinct_among(out, &traders)
}

fn distinct_among(out: &Outcome, traders: &[Player]) -> Option<Evidence> {
    let (&first, rest) = traders.split_first()?;
    let first_amount = out.transfer(first);
    rest.iter()
        .find(|&&p| out.transfer(p) != first_amount)
        .map(|&second| Evidence::DistinctTransfers {
            first,
            first_amount,
            second,
            second_amount: out.transfer(second),
        })
}

/// Common seller price and common buyer price, checked separately.
pub fn common_price(v: &ValuationProfile, out: &Outcome) -> Vec<Violation> {
    [Side::Seller, Side::Buyer]
        .into_iter()
        .filter_map(|side| distinct_on_side(out, side))
        .map(|e| Violation::new(Property::CommonPrice, v, e))
        .collect()
}

/// Every player sitting at their worst type must get exactly zero.
pub fn worst_type(v: &ValuationProfile, out: &Outcome) -> Vec<Violation> {
    v.shape()
        .iter_players()
        .filter(|&p| v.get(p) == p.worst_type())
        .filter_map(|p| {
            let payoff = out.payoff(v, p);
            (!payoff.is_zero())
                .then(|| Violation::new(Property::WorstType, v, Evidence::WorstTypePayoff { payoff }).by(p))
        })
        .collect()
}

/// Weak non-bossiness between `player`'s reports `v_k` and `report`: one
/// witness per other player whose transfer moves.
pub fn nonbossy(
    v: &ValuationProfile,
    player: Player,
    report: Amount,
    at_v: &Outcome,
    at_report: &Outcome,
) -> Vec<Violation> {
    if at_v.trades(player) != at_report.trades(player)
        || at_v.transfer(player) != at_report.transfer(player)
    {
        return Vec::new();
    }
    v.shape()
        .iter_players()
        .filter(|&p| at_v.transfer(p) != at_report.transfer(p))
        .map(|affected| {
            Violation::new(
                Property::NonBossy,
                v,
                Evidence::BossyChange {
                    affected,
                    before: at_v.transfer(affected),
                    after: at_report.transfer(affected),
                },
            )
            .by(player)
            .reporting(report)
        })
        .collect()
}

/// Seller allocation must not rise, buyer allocation must not fall, as the
/// player's own valuation rises from `v_k` to `higher`.
pub fn monotone(
    v: &ValuationProfile,
    player: Player,
    higher: Amount,
    at_lower: &Outcome,
    at_higher: &Outcome,
) -> Option<Violation> {
    let lo = at_lower.trades(player);
    let hi = at_higher.trades(player);
    let bad = match player.side() {
        Side::Seller => !lo && hi,
        Side::Buyer => lo && !hi,
    };
    bad.then(|| {
        Violation::new(
            Property::Monotone,
            v,
            Evidence::Allocation {
                at_lower: lo,
                at_higher: hi,
            },
        )
        .by(player)
        .reporting(higher)
    })
}

/// Envelope identity along one player's axis.
///
/// `column[t]` is the outcome with the player's valuation at `axis[t]` and
/// everyone else as in `v`; `pos` is the player's own position. `extreme` is
/// the outcome at the worst type (1 for sellers, 0 for buyers). The integral
/// is a left-endpoint Riemann sum over the axis points extended to the
/// relevant end of `[0, 1]`.
pub fn envelope(
    v: &ValuationProfile,
    player: Player,
    axis: &[Amount],
    pos: usize,
    column: &[Outcome],
    extreme: &Outcome,
    tol: Amount,
) -> Option<Violation> {
    let value = axis[pos];
    let worst = player.worst_type();
    let worst_payoff = extreme.payoff_with(player, worst);
    let bit = |o: &Outcome| if o.trades(player) { Amount::ONE } else { Amount::ZERO };
    let integral: Amount = match player.side() {
        Side::Seller => (pos..axis.len())
            .map(|t| {
                let next = axis.get(t + 1).copied().unwrap_or(Amount::ONE);
                bit(&column[t]) * (next - axis[t])
            })
            .sum(),
        Side::Buyer => {
            let head = bit(extreme) * axis[0];
            let body: Amount = (0..pos).map(|t| bit(&column[t]) * (axis[t + 1] - axis[t])).sum();
            head + body
        }
    };
    let payoff = column[pos].payoff_with(player, value);
    ((payoff - integral - worst_payoff).abs() > tol).then(|| {
        Violation::new(
            Property::Envelope,
            v,
            Evidence::Envelope {
                payoff,
                integral,
                worst_payoff,
            },
        )
        .by(player)
    })
}

/// The single price all traders face, if there is one.
pub fn common_trader_price(out: &Outcome) -> Option<Amount> {
    let traders: Vec<Player> = out.trader_set().players().collect();
    let (&first, rest) = traders.split_first()?;
    let price = out.transfer(first);
    rest.iter().all(|&p| out.transfer(p) == price).then_some(price)
}

/// Clauses (i)-(iv) of the single-price structure at one profile.
pub fn prop1_profile(v: &ValuationProfile, out: &Outcome) -> Vec<Violation> {
    let mut found = Vec::new();
    let traders = out.trader_set();
    for p in v.shape().iter_players() {
        if !traders.contains(p) && !out.transfer(p).is_zero() {
            found.push(
                Violation::new(
                    Property::Prop1Structure,
                    v,
                    Evidence::NonTraderTransfer {
                        amount: out.transfer(p),
                    },
                )
                .by(p),
            );
        }
    }
    if traders.is_empty() {
        return found;
    }
    found.extend(volume(Property::Prop1Structure, v, out));
    let players: Vec<Player> = traders.players().collect();
    if let Some(e) = distinct_among(out, &players) {
        found.push(Violation::new(Property::Prop1Structure, v, e));
    }
    for p in traders.players() {
        let valuation = v.get(p);
        let price = out.transfer(p);
        let bad = match p.side() {
            Side::Seller => valuation > price,
            Side::Buyer => valuation < price,
        };
        if bad {
            found.push(
                Violation::new(Property::Prop1Structure, v, Evidence::PriceBound { valuation, price })
                    .by(p),
            );
        }
    }
    found
}

/// Clause (ii'): moving trader `player` to `report` keeps the trader set but
/// changes the common price.
pub fn prop1_independence(
    v: &ValuationProfile,
    player: Player,
    report: Amount,
    at_v: &Outcome,
    at_report: &Outcome,
) -> Option<Violation> {
    if !at_v.trades(player) {
        return None;
    }
    let before = common_trader_price(at_v)?;
    if at_report.trader_set() != at_v.trader_set() {
        return None;
    }
    let after = common_trader_price(at_report)?;
    (after != before).then(|| {
        Violation::new(Property::Prop1Structure, v, Evidence::PriceMoved { before, after })
            .by(player)
            .reporting(report)
    })
}

/// Traders at `v` who do not share one price.
pub fn prop2_profile(v: &ValuationProfile, out: &Outcome) -> Option<Violation> {
    let players: Vec<Player> = out.trader_set().players().collect();
    distinct_among(out, &players).map(|e| Violation::new(Property::Prop2Structure, v, e))
}

/// The trader set realized at both profiles clears at two different prices.
pub fn prop2_pair(
    reference: &ValuationProfile,
    at_reference: &Outcome,
    v: &ValuationProfile,
    out: &Outcome,
) -> Option<Violation> {
    let traders = out.trader_set();
    if traders.is_empty() || traders != at_reference.trader_set() {
        return None;
    }
    let reference_price = common_trader_price(at_reference)?;
    let price = common_trader_price(out)?;
    (price != reference_price).then(|| {
        Violation::new(
            Property::Prop2Structure,
            v,
            Evidence::PriceByTraderSet {
                traders,
                reference: reference.clone(),
                reference_price,
                price,
            },
        )
    })
}

/// Non-traders who value the good better than some trader on their side,
/// unless the price excludes them or both sit in the same rationing pool.
pub fn value_respecting(
    v: &ValuationProfile,
    out: &Outcome,
    pool: Option<&TraderSet>,
) -> Vec<Violation> {
    let shape = v.shape();
    let same_pool =
        |a: Player, b: Player| pool.is_some_and(|t| t.contains(a) && t.contains(b));
    let mut found = Vec::new();
    for p in shape.iter_players().filter(|&p| !out.trades(p)) {
        let valuation = v.get(p);
        let peers: Vec<Player> = match p.side() {
            Side::Seller => (0..shape.sellers).map(Player::Seller).collect(),
            Side::Buyer => (0..shape.buyers).map(Player::Buyer).collect(),
        };
        let outranked = peers.into_iter().filter(|&t| out.trades(t)).find(|&t| {
            let tv = v.get(t);
            let price = out.transfer(t);
            let (better, priced_out) = match p.side() {
                Side::Seller => (valuation < tv, valuation >= price),
                Side::Buyer => (valuation > tv, valuation <= price),
            };
            better && !priced_out && !same_pool(p, t)
        });
        if let Some(t) = outranked {
            found.push(
                Violation::new(
                    Property::ValueRespecting,
                    v,
                    Evidence::Priority {
                        trader: t,
                        trader_valuation: v.get(t),
                        valuation,
                    },
                )
                .by(p),
            );
        }
    }
    found
}
