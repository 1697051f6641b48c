use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{MarketShape, Outcome, TraderSet, ValuationProfile};

pub(crate) fn check_price(label: &str, price: Amount) -> Result<Amount> {
    if price.is_unit() {
        Ok(price)
    } else {
        Err(Error::Parameter(format!("{label} = {price} lies outside [0, 1]")))
    }
}

/// Trade is strictly profitable for both sides: `s < price < b`.
pub(crate) fn profitable(seller: Amount, price: Amount, buyer: Amount) -> bool {
    seller < price && price < buyer
}

/// Bilateral posted price: one seller, one buyer, trade at `price` iff
/// `s_1 < price < b_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostedPrice {
    price: Amount,
}

impl PostedPrice {
    pub fn new(price: Amount) -> Result<Self> {
        Ok(PostedPrice {
            price: check_price("price", price)?,
        })
    }

    pub fn price(&self) -> Amount {
        self.price
    }
}

impl Mechanism for PostedPrice {
    fn name(&self) -> &str {
        "bilateral_posted"
    }

    fn shape(&self) -> MarketShape {
        MarketShape {
            sellers: 1,
            buyers: 1,
        }
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(self.shape())?;
        if profitable(v.seller(0), self.price, v.buyer(0)) {
            Ok(Outcome::trade_at(self.shape(), &TraderSet::new([0], [0]), self.price))
        } else {
            Ok(Outcome::no_trade(self.shape()))
        }
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![("price".into(), self.price.to_string())]
    }

    fn posted_prices(&self) -> Vec<Amount> {
        vec![self.price]
    }
}

/// Independent posted prices for seller/buyer pairs: seller `k` trades with
/// buyer `k` at `prices[k]` iff `s_k < prices[k] < b_k`.
///
/// With two pairs this is a robust mechanism without a common price.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairwisePostedPrices {
    prices: Vec<Amount>,
}

impl PairwisePostedPrices {
    pub fn new(prices: Vec<Amount>) -> Result<Self> {
        if prices.is_empty() {
            return Err(Error::Parameter("at least one pair price is required".into()));
        }
        for (k, &p) in prices.iter().enumerate() {
            check_price(&format!("price of pair {}", k + 1), p)?;
        }
        Ok(PairwisePostedPrices { prices })
    }

    pub fn prices(&self) -> &[Amount] {
        &self.prices
    }
}

impl Mechanism for PairwisePostedPrices {
    fn name(&self) -> &str {
        "example1"
    }

    fn shape(&self) -> MarketShape {
        MarketShape {
            sellers: self.prices.len(),
            buyers: self.prices.len(),
        }
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(self.shape())?;
        let mut out = Outcome::no_trade(self.shape());
        for (k, &price) in self.prices.iter().enumerate() {
            if profitable(v.seller(k), price, v.buyer(k)) {
                out.seller_trades[k] = true;
                out.buyer_trades[k] = true;
                out.receipts[k] = price;
                out.payments[k] = price;
            }
        }
        Ok(out)
    }

    fn params(&self) -> Vec<(String, String)> {
        self.prices
            .iter()
            .enumerate()
            .map(|(k, p)| (format!("price{}", k + 1), p.to_string()))
            .collect()
    }

    fn posted_prices(&self) -> Vec<Amount> {
        self.prices.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::dec;
    use crate::model::Player;

    fn v(s: &[&str], b: &[&str]) -> ValuationProfile {
        ValuationProfile::new(s.iter().map(|x| dec(x)).collect(), b.iter().map(|x| dec(x)).collect())
            .unwrap()
    }

    #[test]
    fn bilateral_trades_only_when_strictly_profitable() {
        let m = PostedPrice::new(dec("0.5")).unwrap();
        let out = m.evaluate(&v(&["0.2"], &["0.8"])).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0], [0]));
        assert_eq!(out.receipts, vec![dec("0.5")]);
        assert_eq!(out.payments, vec![dec("0.5")]);
        assert_eq!(out.payoff(&v(&["0.2"], &["0.8"]), Player::Seller(0)), dec("0.3"));

        // indifferent seller does not trade
        assert_eq!(m.evaluate(&v(&["0.5"], &["0.8"])).unwrap(), Outcome::no_trade(m.shape()));
        assert_eq!(m.evaluate(&v(&["0.6"], &["0.4"])).unwrap(), Outcome::no_trade(m.shape()));
    }

    #[test]
    fn bilateral_rejects_bad_price_and_shape() {
        assert!(PostedPrice::new(dec("1.01")).is_err());
        assert!(PostedPrice::new(dec("-0.01")).is_err());
        let m = PostedPrice::new(dec("0.5")).unwrap();
        assert!(m.evaluate(&v(&["0.2", "0.1"], &["0.8"])).is_err());
    }

    #[test]
    fn pairs_trade_independently() {
        let m = PairwisePostedPrices::new(vec![dec("0.3"), dec("0.6")]).unwrap();
        let out = m.evaluate(&v(&["0.1", "0.5"], &["0.9", "0.7"])).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([0, 1], [0, 1]));
        assert_eq!(out.receipts, vec![dec("0.3"), dec("0.6")]);
        assert_eq!(out.payments, vec![dec("0.3"), dec("0.6")]);

        let out = m.evaluate(&v(&["0.4", "0.5"], &["0.9", "0.7"])).unwrap();
        assert_eq!(out.trader_set(), TraderSet::new([1], [1]));
        assert_eq!(out.receipts, vec![Amount::ZERO, dec("0.6")]);

        let out = m.evaluate(&v(&["1", "1"], &["0", "0"])).unwrap();
        assert_eq!(out, Outcome::no_trade(m.shape()));
    }
}
