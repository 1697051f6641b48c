use std::fmt;

use crate::amount::Amount;
use crate::error::Result;
use crate::model::{MarketShape, Outcome, TraderSet, ValuationProfile};

/// A deterministic direct mechanism `(p, q, x, y)`.
///
/// `evaluate` must be pure: the same profile always yields the same outcome,
/// with exactly `m` seller entries and `n` buyer entries.
pub trait Mechanism: Send + Sync {
    fn name(&self) -> &str;

    fn shape(&self) -> MarketShape;

    fn evaluate(&self, profile: &ValuationProfile) -> Result<Outcome>;

    /// Parameter echo for reports, as `(key, value)` pairs.
    fn params(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    /// Constant prices the mechanism posts. Grids straddle these points.
    fn posted_prices(&self) -> Vec<Amount> {
        Vec::new()
    }

    /// The pool of eligible traders before priority rationing, for mechanisms
    /// that ration by a declared priority order.
    fn rationing_pool(&self, _profile: &ValuationProfile) -> Result<Option<TraderSet>> {
        Ok(None)
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn shape(&self) -> MarketShape {
        (**self).shape()
    }
    fn evaluate(&self, profile: &ValuationProfile) -> Result<Outcome> {
        (**self).evaluate(profile)
    }
    fn params(&self) -> Vec<(String, String)> {
        (**self).params()
    }
    fn posted_prices(&self) -> Vec<Amount> {
        (**self).posted_prices()
    }
    fn rationing_pool(&self, profile: &ValuationProfile) -> Result<Option<TraderSet>> {
        (**self).rationing_pool(profile)
    }
}

/// A mechanism defined by a closure. Useful for ad-hoc and deliberately
/// broken rules.
pub struct FnMechanism<F> {
    name: String,
    shape: MarketShape,
    rule: F,
}

impl<F> FnMechanism<F>
where
    F: Fn(&ValuationProfile) -> Outcome + Send + Sync,
{
    pub fn new(name: impl Into<String>, shape: MarketShape, rule: F) -> Self {
        FnMechanism {
            name: name.into(),
            shape,
            rule,
        }
    }
}

impl<F> Mechanism for FnMechanism<F>
where
    F: Fn(&ValuationProfile) -> Outcome + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn shape(&self) -> MarketShape {
        self.shape
    }

    fn evaluate(&self, profile: &ValuationProfile) -> Result<Outcome> {
        profile.check_shape(self.shape)?;
        let out = (self.rule)(profile);
        out.check_shape(self.shape)?;
        Ok(out)
    }
}

impl<F> fmt::Debug for FnMechanism<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMechanism")
            .field("name", &self.name)
            .field("shape", &self.shape)
            .finish()
    }
}
