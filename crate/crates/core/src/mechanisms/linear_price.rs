//! The linear price mechanism.
//!
//! Sellers are sorted ascending and buyers descending. The tentative volume
//! `kappa` is the largest `k` with `s_(k) <= b_(k)`. The price is a fixed
//! linear combination of the order statistics of the players ranked after
//! `kappa`, and the eligible traders on each side are those ranked within
//! `kappa` who strictly profit at that price. The longer side is rationed by
//! a fixed priority permutation.

use std::collections::BTreeSet;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{MarketShape, Outcome, TraderSet, ValuationProfile};

/// Price used when no player ranks after the tentative volume, i.e.
/// `kappa = m = n`.
pub const DEFAULT_FALLBACK_PRICE: Amount = Amount::HALF;

/// Sorted valuations with the original indices attached.
///
/// Ties are broken by original index ascending on both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderStatistics {
    /// `(s_(1), i_1), ..., (s_(m), i_m)`, ascending.
    pub sorted_sellers: Vec<(Amount, usize)>,
    /// `(b_(1), j_1), ..., (b_(n), j_n)`, descending.
    pub sorted_buyers: Vec<(Amount, usize)>,
    pub kappa: usize,
}

impl OrderStatistics {
    pub fn compute(v: &ValuationProfile) -> Self {
        let mut sorted_sellers: Vec<(Amount, usize)> =
            v.sellers().iter().copied().enumerate().map(|(i, s)| (s, i)).collect();
        sorted_sellers.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut sorted_buyers: Vec<(Amount, usize)> =
            v.buyers().iter().copied().enumerate().map(|(j, b)| (b, j)).collect();
        sorted_buyers.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        // k = 0 always qualifies (s_(0) = 0 <= 1 = b_(0)) and the qualifying
        // k form a prefix because s_(k) rises while b_(k) falls.
        let kappa = sorted_sellers
            .iter()
            .zip(&sorted_buyers)
            .take_while(|((s, _), (b, _))| s <= b)
            .count();
        OrderStatistics {
            sorted_sellers,
            sorted_buyers,
            kappa,
        }
    }

    pub fn sellers(&self) -> usize {
        self.sorted_sellers.len()
    }

    pub fn buyers(&self) -> usize {
        self.sorted_buyers.len()
    }

    /// `s_(k)` for `k` in `0..=m+1`, with `s_(0) = 0` and `s_(m+1) = 1`.
    pub fn seller(&self, k: usize) -> Amount {
        match k {
            0 => Amount::ZERO,
            k if k <= self.sellers() => self.sorted_sellers[k - 1].0,
            k if k == self.sellers() + 1 => Amount::ONE,
            _ => panic!("seller order statistic {k} out of range"),
        }
    }

    /// `b_(k)` for `k` in `0..=n+1`, with `b_(0) = 1` and `b_(n+1) = 0`.
    pub fn buyer(&self, k: usize) -> Amount {
        match k {
            0 => Amount::ONE,
            k if k <= self.buyers() => self.sorted_buyers[k - 1].0,
            k if k == self.buyers() + 1 => Amount::ZERO,
            _ => panic!("buyer order statistic {k} out of range"),
        }
    }

    pub fn sorted_seller_values(&self) -> Vec<Amount> {
        self.sorted_sellers.iter().map(|p| p.0).collect()
    }

    pub fn sorted_buyer_values(&self) -> Vec<Amount> {
        self.sorted_buyers.iter().map(|p| p.0).collect()
    }
}

pub fn compute_order_stats(v: &ValuationProfile) -> OrderStatistics {
    OrderStatistics::compute(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPriceParams {
    /// Seller coefficients `c_1..c_m`.
    pub seller_weights: Vec<Amount>,
    /// Buyer coefficients `d_1..d_n`.
    pub buyer_weights: Vec<Amount>,
    /// Seller rationing priority; `seller_priority[0]` is served first.
    pub seller_priority: Vec<usize>,
    /// Buyer rationing priority; `buyer_priority[0]` is served first.
    pub buyer_priority: Vec<usize>,
    pub fallback_price: Amount,
}

impl LinearPriceParams {
    /// Identity priorities and the default fallback price.
    pub fn new(seller_weights: Vec<Amount>, buyer_weights: Vec<Amount>) -> Self {
        let m = seller_weights.len();
        let n = buyer_weights.len();
        LinearPriceParams {
            seller_weights,
            buyer_weights,
            seller_priority: (0..m).collect(),
            buyer_priority: (0..n).collect(),
            fallback_price: DEFAULT_FALLBACK_PRICE,
        }
    }

    /// `d_1 = 1` and every other coefficient zero: the price is `b_(kappa+1)`.
    pub fn next_buyer(m: usize, n: usize) -> Self {
        let mut d = vec![Amount::ZERO; n];
        if n > 0 {
            d[0] = Amount::ONE;
        }
        LinearPriceParams::new(vec![Amount::ZERO; m], d)
    }

    pub fn with_priorities(mut self, sellers: Vec<usize>, buyers: Vec<usize>) -> Self {
        self.seller_priority = sellers;
        self.buyer_priority = buyers;
        self
    }

    pub fn with_fallback(mut self, price: Amount) -> Self {
        self.fallback_price = price;
        self
    }

    pub fn validate(&self) -> Result<MarketShape> {
        let shape = MarketShape::new(self.seller_weights.len(), self.buyer_weights.len())?;
        let weights = self.seller_weights.iter().chain(&self.buyer_weights);
        if let Some(w) = weights.clone().find(|w| w.is_negative()) {
            return Err(Error::Configuration(format!("coefficient {w} is negative")));
        }
        let total: Amount = weights.sum();
        if total > Amount::ONE {
            return Err(Error::Configuration(format!(
                "coefficients sum to {total}, above 1; the price could leave [0, 1]"
            )));
        }
        check_permutation("seller priority", &self.seller_priority, shape.sellers)?;
        check_permutation("buyer priority", &self.buyer_priority, shape.buyers)?;
        if !self.fallback_price.is_unit() {
            return Err(Error::Configuration(format!(
                "fallback price {} lies outside [0, 1]",
                self.fallback_price
            )));
        }
        Ok(shape)
    }
}

fn check_permutation(label: &str, perm: &[usize], len: usize) -> Result<()> {
    let seen: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != len || seen.len() != len || seen.iter().any(|&k| k >= len) {
        return Err(Error::Configuration(format!(
            "{label} {perm:?} is not a permutation of 0..{len}"
        )));
    }
    Ok(())
}

/// Every intermediate quantity of one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPriceTrace {
    pub stats: OrderStatistics,
    pub price: Amount,
    /// True when the fallback price was used instead of the linear formula.
    pub used_fallback: bool,
    /// Eligible traders before rationing.
    pub eligible: TraderSet,
    /// Traders after rationing.
    pub traders: TraderSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearPrice {
    shape: MarketShape,
    params: LinearPriceParams,
}

impl LinearPrice {
    pub fn new(params: LinearPriceParams) -> Result<Self> {
        let shape = params.validate()?;
        Ok(LinearPrice { shape, params })
    }

    pub fn params(&self) -> &LinearPriceParams {
        &self.params
    }

    /// The price at a given tentative volume.
    ///
    /// The linear formula runs over whichever players rank after `kappa`.
    /// When `kappa` equals the shorter side but the longer side still has
    /// players ranked after it, only that side's terms contribute. The
    /// fallback price applies only when nobody ranks after `kappa`.
    fn price(&self, stats: &OrderStatistics) -> (Amount, bool) {
        let (m, n, k) = (self.shape.sellers, self.shape.buyers, stats.kappa);
        if k == m && k == n {
            return (self.params.fallback_price, true);
        }
        let seller_part: Amount = (1..=m - k)
            .map(|l| self.params.seller_weights[l - 1] * stats.seller(k + l))
            .sum();
        let buyer_part: Amount = (1..=n - k)
            .map(|l| self.params.buyer_weights[l - 1] * stats.buyer(k + l))
            .sum();
        (seller_part + buyer_part, false)
    }

    pub fn trace(&self, v: &ValuationProfile) -> Result<LinearPriceTrace> {
        v.check_shape(self.shape)?;
        let stats = OrderStatistics::compute(v);
        let (price, used_fallback) = self.price(&stats);
        let s_cut = stats.seller(stats.kappa);
        let b_cut = stats.buyer(stats.kappa);
        let eligible_sellers: BTreeSet<usize> = (0..self.shape.sellers)
            .filter(|&i| v.seller(i) <= s_cut && v.seller(i) < price)
            .collect();
        let eligible_buyers: BTreeSet<usize> = (0..self.shape.buyers)
            .filter(|&j| v.buyer(j) >= b_cut && v.buyer(j) > price)
            .collect();
        let volume = eligible_sellers.len().min(eligible_buyers.len());
        let ration = |pool: &BTreeSet<usize>, priority: &[usize]| -> BTreeSet<usize> {
            priority.iter().copied().filter(|k| pool.contains(k)).take(volume).collect()
        };
        let traders = TraderSet {
            sellers: ration(&eligible_sellers, &self.params.seller_priority),
            buyers: ration(&eligible_buyers, &self.params.buyer_priority),
        };
        Ok(LinearPriceTrace {
            stats,
            price,
            used_fallback,
            eligible: TraderSet {
                sellers: eligible_sellers,
                buyers: eligible_buyers,
            },
            traders,
        })
    }
}

impl Mechanism for LinearPrice {
    fn name(&self) -> &str {
        "linear_price"
    }

    fn shape(&self) -> MarketShape {
        self.shape
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        let trace = self.trace(v)?;
        Ok(Outcome::trade_at(self.shape, &trace.traders, trace.price))
    }

    fn params(&self) -> Vec<(String, String)> {
        let list = |xs: &[Amount]| xs.iter().map(Amount::to_string).collect::<Vec<_>>().join(",");
        let perm = |xs: &[usize]| xs.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(",");
        vec![
            ("c".into(), list(&self.params.seller_weights)),
            ("d".into(), list(&self.params.buyer_weights)),
            ("sigma".into(), perm(&self.params.seller_priority)),
            ("beta".into(), perm(&self.params.buyer_priority)),
            ("fallback_price".into(), self.params.fallback_price.to_string()),
        ]
    }

    fn posted_prices(&self) -> Vec<Amount> {
        vec![self.params.fallback_price]
    }

    fn rationing_pool(&self, v: &ValuationProfile) -> Result<Option<TraderSet>> {
        Ok(Some(self.trace(v)?.eligible))
    }
}
