use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{Outcome, Player};
use crate::verify::checks::extreme_outcome;
use crate::verify::grid::Grid;
use crate::verify::rules;
use crate::verify::violation::{Evidence, Property, Violation};

impl Violation {
    /// Re-evaluates the mechanism at the stored profile(s) and reports whether
    /// the same violation, with identical evidence, comes out again.
    ///
    /// `grid` is only consulted for envelope witnesses, whose integral runs
    /// along the player's grid axis.
    pub fn replay(&self, mech: &dyn Mechanism, grid: &Grid) -> Result<bool> {
        let v = &self.profile;
        let out = mech.evaluate(v)?;
        let unilateral = || -> Result<(Player, Amount, Outcome)> {
            match (self.player, self.deviation) {
                (Some(p), Some(r)) => Ok((p, r, mech.evaluate(&v.with(p, r))?)),
                _ => Err(Error::Configuration(format!(
                    "{} witness lacks a player or deviation",
                    self.property
                ))),
            }
        };
        let same = |found: Option<Violation>| found.as_ref() == Some(self);
        let listed = |found: Vec<Violation>| found.contains(self);
        Ok(match self.property {
            Property::Ic => {
                let (p, r, dev) = unilateral()?;
                same(rules::ic(v, p, r, &out, &dev))
            }
            Property::Ir => listed(rules::ir(v, &out)),
            Property::Bb => same(rules::bb(v, &out)),
            Property::Nw => same(rules::nw(v, &out)),
            Property::CommonPrice => listed(rules::common_price(v, &out)),
            Property::WorstType => listed(rules::worst_type(v, &out)),
            Property::NonBossy => {
                let (p, r, dev) = unilateral()?;
                listed(rules::nonbossy(v, p, r, &out, &dev))
            }
            Property::Monotone => {
                let (p, r, dev) = unilateral()?;
                same(rules::monotone(v, p, r, &out, &dev))
            }
            Property::Envelope => {
                let Some(p) = self.player else { return Ok(false) };
                let axis = grid.axis(p);
                let Ok(pos) = axis.binary_search(&v.get(p)) else { return Ok(false) };
                let column = axis
                    .iter()
                    .map(|&a| mech.evaluate(&v.with(p, a)))
                    .collect::<Result<Vec<_>>>()?;
                let extreme = extreme_outcome(mech, v, p, axis, &column)?;
                same(rules::envelope(v, p, axis, pos, &column, &extreme, Amount::ZERO))
            }
            Property::Prop1Structure => match self.evidence {
                Evidence::PriceMoved { .. } => {
                    let (p, r, dev) = unilateral()?;
                    same(rules::prop1_independence(v, p, r, &out, &dev))
                }
                _ => listed(rules::prop1_profile(v, &out)),
            },
            Property::Prop2Structure => match &self.evidence {
                Evidence::PriceByTraderSet { reference, .. } => {
                    let at_reference = mech.evaluate(reference)?;
                    same(rules::prop2_pair(reference, &at_reference, v, &out))
                }
                _ => same(rules::prop2_profile(v, &out)),
            },
            Property::ValueRespecting => {
                let pool = mech.rationing_pool(v)?;
                listed(rules::value_respecting(v, &out, pool.as_ref()))
            }
        })
    }
}
