//! Market model: players, valuation profiles, outcomes and payoffs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;

/// Number of sellers `m` and buyers `n`, both at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MarketShape {
    pub sellers: usize,
    pub buyers: usize,
}

impl MarketShape {
    pub fn new(sellers: usize, buyers: usize) -> Result<Self> {
        if sellers == 0 || buyers == 0 {
            return Err(Error::Parameter(format!(
                "a market needs at least one seller and one buyer (got m={sellers}, n={buyers})"
            )));
        }
        Ok(MarketShape { sellers, buyers })
    }

    pub fn players(&self) -> usize {
        self.sellers + self.buyers
    }

    /// All players, sellers first, in index order.
    pub fn iter_players(&self) -> impl Iterator<Item = Player> {
        let (m, n) = (self.sellers, self.buyers);
        (0..m).map(Player::Seller).chain((0..n).map(Player::Buyer))
    }

    pub fn contains(&self, player: Player) -> bool {
        match player {
            Player::Seller(i) => i < self.sellers,
            Player::Buyer(j) => j < self.buyers,
        }
    }

    pub(crate) fn check_player(&self, player: Player) -> Result<()> {
        if self.contains(player) {
            Ok(())
        } else {
            Err(Error::PlayerOutOfRange {
                player: player.to_string(),
                sellers: self.sellers,
                buyers: self.buyers,
            })
        }
    }

    /// Position of a player in the flattened `(s, b)` vector.
    pub fn flat_index(&self, player: Player) -> usize {
        match player {
            Player::Seller(i) => i,
            Player::Buyer(j) => self.sellers + j,
        }
    }
}

impl fmt::Display for MarketShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}, n={}", self.sellers, self.buyers)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Seller,
    Buyer,
}

/// A seller or buyer, indexed from zero. Displayed with one-based labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    Seller(usize),
    Buyer(usize),
}

impl Player {
    pub fn side(&self) -> Side {
        match self {
            Player::Seller(_) => Side::Seller,
            Player::Buyer(_) => Side::Buyer,
        }
    }

    pub fn index(&self) -> usize {
        match *self {
            Player::Seller(i) | Player::Buyer(i) => i,
        }
    }

    /// The valuation at which this player's payoff is lowest: 1 for sellers,
    /// 0 for buyers.
    pub fn worst_type(&self) -> Amount {
        match self {
            Player::Seller(_) => Amount::ONE,
            Player::Buyer(_) => Amount::ZERO,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Seller(i) => write!(f, "seller {}", i + 1),
            Player::Buyer(j) => write!(f, "buyer {}", j + 1),
        }
    }
}

/// Parses the rendered label, e.g. `seller 1` or `buyer 2`.
impl FromStr for Player {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("`{s}` is not a player label like `seller 1`"));
        let (side, label) = s.trim().split_once(char::is_whitespace).ok_or_else(bad)?;
        let k: usize = label.trim().parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match side.to_ascii_lowercase().as_str() {
            "seller" => Ok(Player::Seller(k - 1)),
            "buyer" => Ok(Player::Buyer(k - 1)),
            _ => Err(bad()),
        }
    }
}

/// A point `v = (s, b)` of the valuation space `[0,1]^(m+n)`.
///
/// Ordered lexicographically: sellers first, then buyers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValuationProfile {
    sellers: Vec<Amount>,
    buyers: Vec<Amount>,
}

impl ValuationProfile {
    pub fn new(sellers: Vec<Amount>, buyers: Vec<Amount>) -> Result<Self> {
        MarketShape::new(sellers.len(), buyers.len())?;
        if let Some(bad) = sellers.iter().chain(&buyers).find(|v| !v.is_unit()) {
            return Err(Error::Parameter(format!("valuation {bad} lies outside [0, 1]")));
        }
        Ok(ValuationProfile { sellers, buyers })
    }

    /// Splits a flat `(s_1..s_m, b_1..b_n)` list.
    pub fn from_flat(shape: MarketShape, values: &[Amount]) -> Result<Self> {
        if values.len() != shape.players() {
            return Err(Error::Dimension {
                expected: format!("{} valuations ({shape})", shape.players()),
                actual: values.len().to_string(),
            });
        }
        let (s, b) = values.split_at(shape.sellers);
        ValuationProfile::new(s.to_vec(), b.to_vec())
    }

    pub fn shape(&self) -> MarketShape {
        MarketShape {
            sellers: self.sellers.len(),
            buyers: self.buyers.len(),
        }
    }

    pub fn sellers(&self) -> &[Amount] {
        &self.sellers
    }

    pub fn buyers(&self) -> &[Amount] {
        &self.buyers
    }

    pub fn seller(&self, i: usize) -> Amount {
        self.sellers[i]
    }

    pub fn buyer(&self, j: usize) -> Amount {
        self.buyers[j]
    }

    /// The player's own valuation. Panics if the player is out of range.
    pub fn get(&self, player: Player) -> Amount {
        match player {
            Player::Seller(i) => self.sellers[i],
            Player::Buyer(j) => self.buyers[j],
        }
    }

    /// `(value, v_{-k})`: the same profile with one player's valuation replaced.
    pub fn with(&self, player: Player, value: Amount) -> ValuationProfile {
        let mut out = self.clone();
        match player {
            Player::Seller(i) => out.sellers[i] = value,
            Player::Buyer(j) => out.buyers[j] = value,
        }
        out
    }

    pub fn check_shape(&self, shape: MarketShape) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::Dimension {
                expected: shape.to_string(),
                actual: self.shape().to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for ValuationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Amount]| v.iter().map(Amount::to_string).collect::<Vec<_>>().join(", ");
        write!(f, "s=({}), b=({})", join(&self.sellers), join(&self.buyers))
    }
}

/// Trading sellers and buyers, `S(v)` and `B(v)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraderSet {
    pub sellers: BTreeSet<usize>,
    pub buyers: BTreeSet<usize>,
}

impl TraderSet {
    pub fn new(
        sellers: impl IntoIterator<Item = usize>,
        buyers: impl IntoIterator<Item = usize>,
    ) -> Self {
        TraderSet {
            sellers: sellers.into_iter().collect(),
            buyers: buyers.into_iter().collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.sellers.is_empty() && self.buyers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sellers.len() + self.buyers.len()
    }

    pub fn is_balanced(&self) -> bool {
        self.sellers.len() == self.buyers.len()
    }

    pub fn contains(&self, player: Player) -> bool {
        match player {
            Player::Seller(i) => self.sellers.contains(&i),
            Player::Buyer(j) => self.buyers.contains(&j),
        }
    }

    pub fn players(&self) -> impl Iterator<Item = Player> + '_ {
        let s = self.sellers.iter().map(|&i| Player::Seller(i));
        s.chain(self.buyers.iter().map(|&j| Player::Buyer(j)))
    }

    pub fn fits(&self, shape: MarketShape) -> bool {
        self.players().all(|p| shape.contains(p))
    }
}

impl fmt::Display for TraderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = |set: &BTreeSet<usize>| {
            set.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
        };
        write!(f, "sellers {{{}}}, buyers {{{}}}", labels(&self.sellers), labels(&self.buyers))
    }
}

/// Allocation bits `(p, q)` and transfers `(x, y)` at one profile.
///
/// `receipts[i]` is what seller `i` receives; `payments[j]` is what buyer `j`
/// pays. Either may be negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub seller_trades: Vec<bool>,
    pub buyer_trades: Vec<bool>,
    pub receipts: Vec<Amount>,
    pub payments: Vec<Amount>,
}

impl Outcome {
    pub fn no_trade(shape: MarketShape) -> Self {
        Outcome {
            seller_trades: vec![false; shape.sellers],
            buyer_trades: vec![false; shape.buyers],
            receipts: vec![Amount::ZERO; shape.sellers],
            payments: vec![Amount::ZERO; shape.buyers],
        }
    }

    /// Everyone in `traders` trades at `price`; everyone else gets nothing.
    pub fn trade_at(shape: MarketShape, traders: &TraderSet, price: Amount) -> Self {
        let mut out = Outcome::no_trade(shape);
        for &i in &traders.sellers {
            out.seller_trades[i] = true;
            out.receipts[i] = price;
        }
        for &j in &traders.buyers {
            out.buyer_trades[j] = true;
            out.payments[j] = price;
        }
        out
    }

    pub fn shape(&self) -> MarketShape {
        MarketShape {
            sellers: self.seller_trades.len(),
            buyers: self.buyer_trades.len(),
        }
    }

    pub fn trades(&self, player: Player) -> bool {
        match player {
            Player::Seller(i) => self.seller_trades[i],
            Player::Buyer(j) => self.buyer_trades[j],
        }
    }

    /// Receipt for a seller, payment for a buyer.
    pub fn transfer(&self, player: Player) -> Amount {
        match player {
            Player::Seller(i) => self.receipts[i],
            Player::Buyer(j) => self.payments[j],
        }
    }

    /// Payoff of `player` whose true valuation is `value`:
    /// `x_i - p_i s_i` for sellers, `q_j b_j - y_j` for buyers.
    pub fn payoff_with(&self, player: Player, value: Amount) -> Amount {
        let traded = self.trades(player);
        match player {
            Player::Seller(i) => {
                if traded {
                    self.receipts[i] - value
                } else {
                    self.receipts[i]
                }
            }
            Player::Buyer(j) => {
                if traded {
                    value - self.payments[j]
                } else {
                    -self.payments[j]
                }
            }
        }
    }

    pub fn payoff(&self, profile: &ValuationProfile, player: Player) -> Amount {
        self.payoff_with(player, profile.get(player))
    }

    pub fn trader_set(&self) -> TraderSet {
        let on = |bits: &[bool]| {
            bits.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k).collect::<BTreeSet<_>>()
        };
        TraderSet {
            sellers: on(&self.seller_trades),
            buyers: on(&self.buyer_trades),
        }
    }

    pub fn units_sold(&self) -> usize {
        self.seller_trades.iter().filter(|&&t| t).count()
    }

    pub fn units_bought(&self) -> usize {
        self.buyer_trades.iter().filter(|&&t| t).count()
    }

    pub fn total_receipts(&self) -> Amount {
        self.receipts.iter().sum()
    }

    pub fn total_payments(&self) -> Amount {
        self.payments.iter().sum()
    }

    pub fn check_shape(&self, shape: MarketShape) -> Result<()> {
        let ok = self.seller_trades.len() == shape.sellers
            && self.receipts.len() == shape.sellers
            && self.buyer_trades.len() == shape.buyers
            && self.payments.len() == shape.buyers;
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: format!("outcome for {shape}"),
                actual: format!(
                    "{} seller bits, {} receipts, {} buyer bits, {} payments",
                    self.seller_trades.len(),
                    self.receipts.len(),
                    self.buyer_trades.len(),
                    self.payments.len()
                ),
            })
        }
    }
}

/// `u_i(v) = x_i(v) - p_i(v) s_i`.
pub fn payoff_seller(mech: &dyn Mechanism, v: &ValuationProfile, i: usize) -> Result<Amount> {
    payoff(mech, v, Player::Seller(i))
}

/// `u_j(v) = q_j(v) b_j - y_j(v)`.
pub fn payoff_buyer(mech: &dyn Mechanism, v: &ValuationProfile, j: usize) -> Result<Amount> {
    payoff(mech, v, Player::Buyer(j))
}

pub fn payoff(mech: &dyn Mechanism, v: &ValuationProfile, player: Player) -> Result<Amount> {
    mech.shape().check_player(player)?;
    let out = mech.evaluate(v)?;
    Ok(out.payoff(v, player))
}

pub fn trader_set(out: &Outcome) -> TraderSet {
    out.trader_set()
}
