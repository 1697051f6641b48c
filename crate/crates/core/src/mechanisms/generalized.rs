//! Generalized posted price mechanisms: one constant price per trader set.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{MarketShape, Outcome, TraderSet, ValuationProfile};

/// A trader set together with the price posted for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PostedOffer {
    pub traders: TraderSet,
    pub price: Amount,
}

impl PostedOffer {
    pub fn new(traders: TraderSet, price: Amount) -> Self {
        PostedOffer { traders, price }
    }

    /// Every seller in the set values the good strictly below the price and
    /// every buyer strictly above it.
    pub fn is_profitable(&self, v: &ValuationProfile) -> bool {
        self.traders.sellers.iter().all(|&i| v.seller(i) < self.price)
            && self.traders.buyers.iter().all(|&j| v.buyer(j) > self.price)
    }
}

/// Chooses the active trader set at each profile. Must return a key of the
/// price map or the empty set.
pub trait SelectionRule: Send + Sync {
    fn select(&self, v: &ValuationProfile, offers: &[PostedOffer]) -> TraderSet;

    fn describe(&self) -> String;
}

/// Picks the first offer, in declared order, whose traders all strictly
/// profit at its price.
#[derive(Clone, Copy, Debug, Default)]
pub struct FirstProfitable;

impl SelectionRule for FirstProfitable {
    fn select(&self, v: &ValuationProfile, offers: &[PostedOffer]) -> TraderSet {
        offers
            .iter()
            .find(|o| o.is_profitable(v))
            .map(|o| o.traders.clone())
            .unwrap_or_default()
    }

    fn describe(&self) -> String {
        "first_profitable".into()
    }
}

/// Wraps a closure as a selection rule.
pub struct SelectWith<F> {
    label: String,
    rule: F,
}

impl<F> SelectWith<F>
where
    F: Fn(&ValuationProfile) -> TraderSet + Send + Sync,
{
    pub fn new(label: impl Into<String>, rule: F) -> Self {
        SelectWith {
            label: label.into(),
            rule,
        }
    }
}

impl<F> SelectionRule for SelectWith<F>
where
    F: Fn(&ValuationProfile) -> TraderSet + Send + Sync,
{
    fn select(&self, v: &ValuationProfile, _offers: &[PostedOffer]) -> TraderSet {
        (self.rule)(v)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

#[derive(Clone)]
pub struct GeneralizedPostedPrice {
    shape: MarketShape,
    offers: Vec<PostedOffer>,
    prices: BTreeMap<TraderSet, Amount>,
    selection: Arc<dyn SelectionRule>,
}

impl GeneralizedPostedPrice {
    /// Validates that every offer is a balanced, nonempty trader set inside
    /// the market with a price in `[0, 1]`, listed at most once.
    pub fn new(
        shape: MarketShape,
        offers: Vec<PostedOffer>,
        selection: Arc<dyn SelectionRule>,
    ) -> Result<Self> {
        let mut prices = BTreeMap::new();
        for offer in &offers {
            let t = &offer.traders;
            if t.is_empty() || !t.is_balanced() {
                return Err(Error::Parameter(format!(
                    "trader set {t} must be nonempty with as many sellers as buyers"
                )));
            }
            if !t.fits(shape) {
                return Err(Error::Parameter(format!("trader set {t} is outside the {shape} market")));
            }
            if !offer.price.is_unit() {
                return Err(Error::Parameter(format!("price {} for {t} lies outside [0, 1]", offer.price)));
            }
            if prices.insert(t.clone(), offer.price).is_some() {
                return Err(Error::Parameter(format!("trader set {t} is listed twice")));
            }
        }
        Ok(GeneralizedPostedPrice {
            shape,
            offers,
            prices,
            selection,
        })
    }

    /// The usual configuration: offers tried in order, first profitable wins.
    pub fn first_profitable(shape: MarketShape, offers: Vec<PostedOffer>) -> Result<Self> {
        Self::new(shape, offers, Arc::new(FirstProfitable))
    }

    pub fn offers(&self) -> &[PostedOffer] {
        &self.offers
    }

    pub fn price_of(&self, traders: &TraderSet) -> Option<Amount> {
        self.prices.get(traders).copied()
    }
}

impl Mechanism for GeneralizedPostedPrice {
    fn name(&self) -> &str {
        "generalized_posted"
    }

    fn shape(&self) -> MarketShape {
        self.shape
    }

    fn evaluate(&self, v: &ValuationProfile) -> Result<Outcome> {
        v.check_shape(self.shape)?;
        let active = self.selection.select(v, &self.offers);
        if active.is_empty() {
            return Ok(Outcome::no_trade(self.shape));
        }
        let price = self.prices.get(&active).ok_or_else(|| {
            Error::Configuration(format!(
                "selection rule `{}` chose {active}, which has no posted price",
                self.selection.describe()
            ))
        })?;
        Ok(Outcome::trade_at(self.shape, &active, *price))
    }

    fn params(&self) -> Vec<(String, String)> {
        let mut out = vec![("selection".to_string(), self.selection.describe())];
        out.extend(
            self.offers
                .iter()
                .enumerate()
                .map(|(k, o)| (format!("offer{}", k + 1), format!("{} @ {}", o.traders, o.price))),
        );
        out
    }

    fn posted_prices(&self) -> Vec<Amount> {
        self.offers.iter().map(|o| o.price).collect()
    }
}

impl fmt::Debug for GeneralizedPostedPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralizedPostedPrice")
            .field("shape", &self.shape)
            .field("offers", &self.offers)
            .field("selection", &self.selection.describe())
            .finish()
    }
}
