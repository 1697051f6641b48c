//! One-seller, two-buyer mechanisms that separate the characterization's
//! assumptions from one another.

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::mechanisms::posted::{check_price, profitable};
use crate::model::{MarketShape, Outcome, TraderSet, ValuationProfile};

const ONE_BY_TWO: MarketShape = MarketShape {
    sellers: 1,
    buyers: 2,
};

/// Separate seller and buyer prices. On trade, seller 1 receives
/// `seller_price`, buyer 1 pays `buyer_price`, and buyer 2 is paid the spread.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadRebate {
    seller_price: Amount,
    buyer_price: Amount,
}

impl SpreadRebate {
    pub fn new(seller_price: Amount, buyer_price: Amount) -> Result<Self> {
        check_price("seller price", seller_price)?;
        check_price("buyer price", buyer_price)?;
        if seller_price >= buyer_price {
            return Err(Error::Parameter(format!(
                "seller price {seller_price} must be below buyer price {buyer_price}"
            )));
        }
        Ok(SpreadRebate {
            seller_price,
            buyer_price,
        })
    }
}

impl Mechanism for SpreadRebate {
    fn name(&self) -> &str {
        "example2"
    }

    fn shape(&self) -> MarketShape {
        ONE_BY_TWO
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(ONE_BY_TWO)?;
        let mut out = Outcome::no_trade(ONE_BY_TWO);
        if v.seller(0) < self.seller_price && self.buyer_price < v.buyer(0) {
            out.seller_trades[0] = true;
            out.buyer_trades[0] = true;
            out.receipts[0] = self.seller_price;
            out.payments[0] = self.buyer_price;
            out.payments[1] = self.seller_price - self.buyer_price;
        }
        Ok(out)
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("seller_price".into(), self.seller_price.to_string()),
            ("buyer_price".into(), self.buyer_price.to_string()),
        ]
    }

    fn posted_prices(&self) -> Vec<Amount> {
        vec![self.seller_price, self.buyer_price]
    }
}

/// The price is the lower of the two buyers' reports; the seller trades with
/// the higher buyer iff `s_1 < price < b_hi`. Ties name buyer 1 the higher.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LowerBidPrice;

impl LowerBidPrice {
    pub fn new() -> Self {
        LowerBidPrice
    }
}

impl Mechanism for LowerBidPrice {
    fn name(&self) -> &str {
        "example3"
    }

    fn shape(&self) -> MarketShape {
        ONE_BY_TWO
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(ONE_BY_TWO)?;
        let (hi, lo) = if v.buyer(0) >= v.buyer(1) { (0, 1) } else { (1, 0) };
        let price = v.buyer(lo);
        if profitable(v.seller(0), price, v.buyer(hi)) {
            Ok(Outcome::trade_at(ONE_BY_TWO, &TraderSet::new([0], [hi]), price))
        } else {
            Ok(Outcome::no_trade(ONE_BY_TWO))
        }
    }
}

/// Buyer 1 trades at `primary` iff `s_1 < primary < b_1`; otherwise buyer 2
/// trades at `secondary` iff `s_1 < secondary < b_2`.
///
/// Any ordering of the two prices is accepted. Only `primary > secondary`
/// yields an incentive-compatible rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieredPostedPrice {
    primary: Amount,
    secondary: Amount,
}

impl TieredPostedPrice {
    pub fn new(primary: Amount, secondary: Amount) -> Result<Self> {
        Ok(TieredPostedPrice {
            primary: check_price("primary price", primary)?,
            secondary: check_price("secondary price", secondary)?,
        })
    }
}

impl Mechanism for TieredPostedPrice {
    fn name(&self) -> &str {
        "example4"
    }

    fn shape(&self) -> MarketShape {
        ONE_BY_TWO
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(ONE_BY_TWO)?;
        let s = v.seller(0);
        let out = if profitable(s, self.primary, v.buyer(0)) {
            Outcome::trade_at(ONE_BY_TWO, &TraderSet::new([0], [0]), self.primary)
        } else if profitable(s, self.secondary, v.buyer(1)) {
            Outcome::trade_at(ONE_BY_TWO, &TraderSet::new([0], [1]), self.secondary)
        } else {
            Outcome::no_trade(ONE_BY_TWO)
        };
        Ok(out)
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("primary_price".into(), self.primary.to_string()),
            ("secondary_price".into(), self.secondary.to_string()),
        ]
    }

    fn posted_prices(&self) -> Vec<Amount> {
        vec![self.primary, self.secondary]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::dec;

    fn v(s: &str, b1: &str, b2: &str) -> ValuationProfile {
        ValuationProfile::new(vec![dec(s)], vec![dec(b1), dec(b2)]).unwrap()
    }

    #[test]
    fn spread_rebate_pays_buyer_two() {
        let m = SpreadRebate::new(dec("0.3"), dec("0.6")).unwrap();
        let out = m.evaluate(&v("0.1", "0.9", "0.5")).unwrap();
        assert_eq!(out.receipts, vec![dec("0.3")]);
        assert_eq!(out.payments, vec![dec("0.6"), dec("-0.3")]);
        assert_eq!(out.buyer_trades, vec![true, false]);
        assert_eq!(out.total_receipts(), out.total_payments());

        assert_eq!(m.evaluate(&v("0.5", "0.9", "0.5")).unwrap(), Outcome::no_trade(ONE_BY_TWO));
        assert!(SpreadRebate::new(dec("0.6"), dec("0.6")).is_err());
        assert!(SpreadRebate::new(dec("0.7"), dec("0.6")).is_err());
    }

    #[test]
    fn lower_bid_sets_the_price() {
        let m = LowerBidPrice::new();
        let out = m.evaluate(&v("0.3", "0.7", "0.4")).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0], [0]));
        assert_eq!(out.payments, vec![dec("0.4"), Amount::ZERO]);

        // buyer 2 moves the price without trading
        let out = m.evaluate(&v("0.3", "0.7", "0.5")).unwrap();
        assert_eq!(out.receipts, vec![dec("0.5")]);
        assert_eq!(out.payments, vec![dec("0.5"), Amount::ZERO]);

        assert_eq!(m.evaluate(&v("0.5", "0.7", "0.4")).unwrap(), Outcome::no_trade(ONE_BY_TWO));
    }

    #[test]
    fn lower_bid_trades_with_higher_buyer_and_not_on_ties() {
        let m = LowerBidPrice::new();
        let out = m.evaluate(&v("0.1", "0.4", "0.8")).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0], [1]));
        assert_eq!(out.receipts, vec![dec("0.4")]);
        assert_eq!(m.evaluate(&v("0.1", "0.6", "0.6")).unwrap(), Outcome::no_trade(ONE_BY_TWO));
    }

    #[test]
    fn tiered_prices() {
        let m = TieredPostedPrice::new(dec("0.6"), dec("0.3")).unwrap();
        let out = m.evaluate(&v("0.1", "0.8", "0.5")).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0], [0]));
        assert_eq!(out.receipts, vec![dec("0.6")]);

        let out = m.evaluate(&v("0.1", "0.4", "0.5")).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0], [1]));
        assert_eq!(out.payments, vec![Amount::ZERO, dec("0.3")]);

        assert_eq!(m.evaluate(&v("0.7", "0.8", "0.5")).unwrap(), Outcome::no_trade(ONE_BY_TWO));
        assert!(TieredPostedPrice::new(dec("1.5"), dec("0.3")).is_err());
    }
}
