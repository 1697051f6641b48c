//! Deviation mining: the most profitable unilateral misreport per player.

use rayon::prelude::*;

use crate::amount::{dec, Amount};
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{Player, ValuationProfile};
use crate::verify::Grid;

/// A strictly profitable misreport.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deviation {
    pub profile: ValuationProfile,
    pub player: Player,
    pub report: Amount,
    pub gain: Amount,
}

impl Deviation {
    /// True when both profiles still produce exactly the stored gain.
    pub fn replay(&self, mech: &dyn Mechanism) -> Result<bool> {
        let value = self.profile.get(self.player);
        let truthful = mech.evaluate(&self.profile)?.payoff_with(self.player, value);
        let deviated = mech
            .evaluate(&self.profile.with(self.player, self.report))?
            .payoff_with(self.player, value);
        Ok(deviated - truthful == self.gain && self.gain > Amount::ZERO)
    }
}

/// Reports near the ends of `[0, 1]` that the constructive arguments need.
pub fn extreme_reports() -> Vec<Amount> {
    vec![Amount::ZERO, dec("0.01"), dec("0.99"), Amount::ONE]
}

/// Every point on any axis of `grid`, plus the extreme reports.
pub fn default_report_grid(grid: &Grid) -> Vec<Amount> {
    let mut pts: Vec<Amount> = grid
        .shape()
        .iter_players()
        .flat_map(|p| grid.axis(p).to_vec())
        .chain(extreme_reports())
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

fn check_reports(reports: &[Amount]) -> Result<Vec<Amount>> {
    if let Some(bad) = reports.iter().find(|r| !r.is_unit()) {
        return Err(Error::Parameter(format!("report {bad} lies outside [0, 1]")));
    }
    let mut sorted = reports.to_vec();
    sorted.sort();
    sorted.dedup();
    Ok(sorted)
}

fn best_in(
    mech: &dyn Mechanism,
    v: &ValuationProfile,
    player: Player,
    reports: &[Amount],
) -> Result<Option<Deviation>> {
    let value = v.get(player);
    let truthful = mech.evaluate(v)?.payoff_with(player, value);
    let mut best: Option<(Amount, Amount)> = None;
    // ascending reports: strict improvement keeps the smallest on ties
    for &r in reports {
        if r == value {
            continue;
        }
        let gain = mech.evaluate(&v.with(player, r))?.payoff_with(player, value) - truthful;
        if gain > Amount::ZERO && best.is_none_or(|(_, g)| gain > g) {
            best = Some((r, gain));
        }
    }
    Ok(best.map(|(report, gain)| Deviation {
        profile: v.clone(),
        player,
        report,
        gain,
    }))
}

/// The report on `report_grid` that maximizes `player`'s true payoff, if it
/// beats truth-telling. Ties go to the smallest report.
pub fn best_deviation(
    mech: &dyn Mechanism,
    v: &ValuationProfile,
    player: Player,
    report_grid: &[Amount],
) -> Result<Option<Deviation>> {
    v.check_shape(mech.shape())?;
    mech.shape().check_player(player)?;
    let reports = check_reports(report_grid)?;
    best_in(mech, v, player, &reports)
}

/// `best_deviation` for every grid profile and player, canonically sorted.
/// An empty result certifies incentive compatibility at grid by report-grid
/// resolution.
pub fn mine_ic_failures(
    mech: &dyn Mechanism,
    grid: &Grid,
    report_grid: &[Amount],
) -> Result<Vec<Deviation>> {
    grid.check_shape(mech.shape())?;
    let reports = check_reports(report_grid)?;
    let chunks = (0..grid.profile_count())
        .into_par_iter()
        .map(|i| {
            let v = grid.profile(i);
            let mut found = Vec::new();
            for player in grid.shape().iter_players() {
                found.extend(best_in(mech, &v, player, &reports)?);
            }
            Ok(found)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<Deviation> = chunks.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}
