use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{Outcome, Player, TraderSet, ValuationProfile};
use crate::verify::grid::Grid;
use crate::verify::rules;
use crate::verify::violation::Violation;

/// Outcomes at every grid profile, by profile index.
pub(crate) struct OutcomeTable<'g> {
    pub grid: &'g Grid,
    pub outcomes: Vec<Outcome>,
}

impl<'g> OutcomeTable<'g> {
    pub fn build(mech: &dyn Mechanism, grid: &'g Grid) -> Result<Self> {
        grid.check_shape(mech.shape())?;
        let outcomes = (0..grid.profile_count())
            .into_par_iter()
            .map(|i| {
                let out = mech.evaluate(&grid.profile(i))?;
                out.check_shape(mech.shape())?;
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OutcomeTable { grid, outcomes })
    }

    /// Calls `f(v, i, player, pos, j)` for every profile `i`, player, and
    /// other position `pos` on that player's axis, where `j` is the index
    /// with the player moved to `pos`. With `upward` only `pos` above the
    /// player's own position is visited.
    fn unilateral<F, I>(&self, upward: bool, f: F) -> Result<Vec<Violation>>
    where
        F: Fn(&ValuationProfile, usize, Player, usize, usize) -> I + Sync,
        I: IntoIterator<Item = Violation>,
    {
        let grid = self.grid;
        scan(grid.profile_count(), |i| {
            let v = grid.profile(i);
            let mut found = Vec::new();
            for player in grid.shape().iter_players() {
                let own = grid.coordinate(i, player);
                let start = if upward { own + 1 } else { 0 };
                for pos in start..grid.axis(player).len() {
                    if pos != own {
                        found.extend(f(&v, i, player, pos, grid.replace(i, player, pos)));
                    }
                }
            }
            Ok(found)
        })
    }
}

/// Runs `f` over every profile index in parallel, then sorts canonically.
pub(crate) fn scan<F>(count: usize, f: F) -> Result<Vec<Violation>>
where
    F: Fn(usize) -> Result<Vec<Violation>> + Sync,
{
    let chunks = (0..count).into_par_iter().map(&f).collect::<Result<Vec<_>>>()?;
    let mut all: Vec<Violation> = chunks.into_iter().flatten().collect();
    all.sort();
    Ok(all)
}

fn per_profile<F>(mech: &dyn Mechanism, grid: &Grid, f: F) -> Result<Vec<Violation>>
where
    F: Fn(&ValuationProfile, &Outcome) -> Vec<Violation> + Sync,
{
    grid.check_shape(mech.shape())?;
    scan(grid.profile_count(), |i| {
        let v = grid.profile(i);
        let out = mech.evaluate(&v)?;
        out.check_shape(mech.shape())?;
        Ok(f(&v, &out))
    })
}

/// Dominant-strategy incentive compatibility against every alternative grid
/// report.
pub fn check_ic(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    let table = OutcomeTable::build(mech, grid)?;
    table.unilateral(false, |v, i, player, pos, j| {
        let report = grid.axis(player)[pos];
        rules::ic(v, player, report, &table.outcomes[i], &table.outcomes[j])
    })
}

/// Ex-post individual rationality.
pub fn check_ir(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    per_profile(mech, grid, rules::ir)
}

/// Ex-post budget balance, exact.
pub fn check_bb(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    per_profile(mech, grid, |v, out| rules::bb(v, out).into_iter().collect())
}

/// Non-wastefulness: units sold equal units bought.
pub fn check_nw(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    per_profile(mech, grid, |v, out| rules::nw(v, out).into_iter().collect())
}

pub fn check_a1_common_price(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    per_profile(mech, grid, rules::common_price)
}

/// Zero payoff for the worst type. Every seller axis must contain 1 and every
/// buyer axis 0.
pub fn check_a2_worst_type(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    grid.check_shape(mech.shape())?;
    for player in grid.shape().iter_players() {
        if !grid.axis(player).contains(&player.worst_type()) {
            return Err(Error::Configuration(format!(
                "grid axis for {player} lacks the worst type {}",
                player.worst_type()
            )));
        }
    }
    per_profile(mech, grid, rules::worst_type)
}

/// Weak non-bossiness over every pair of a player's own grid reports.
pub fn check_a3_nonbossy(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    let table = OutcomeTable::build(mech, grid)?;
    table.unilateral(true, |v, i, player, pos, j| {
        let report = grid.axis(player)[pos];
        rules::nonbossy(v, player, report, &table.outcomes[i], &table.outcomes[j])
    })
}

/// Allocation monotonicity over every pair of a player's grid points.
pub fn check_lemma1_monotone(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    let table = OutcomeTable::build(mech, grid)?;
    table.unilateral(true, |v, i, player, pos, j| {
        let higher = grid.axis(player)[pos];
        rules::monotone(v, player, higher, &table.outcomes[i], &table.outcomes[j])
    })
}

/// Grid-resolution critical valuation for one player and opponent profile.
///
/// `lower` and `upper` bracket the switch; `z` is their midpoint, or the
/// degenerate extreme when the allocation never switches on the grid.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Threshold {
    pub player: Player,
    /// The opponent profile, with the player's own entry at its lowest grid
    /// point.
    pub context: ValuationProfile,
    pub lower: Amount,
    pub upper: Amount,
    pub z: Amount,
}

pub fn extract_thresholds(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Threshold>> {
    let violations = check_lemma1_monotone(mech, grid)?;
    if !violations.is_empty() {
        return Err(Error::NotMonotone(violations));
    }
    let table = OutcomeTable::build(mech, grid)?;
    let mut out: Vec<Threshold> = (0..grid.profile_count())
        .into_par_iter()
        .flat_map_iter(|i| {
            let table = &table;
            grid.shape()
                .iter_players()
                .filter(move |&p| grid.coordinate(i, p) == 0)
                .map(move |p| {
                    let axis = grid.axis(p);
                    let trades = (0..axis.len())
                        .filter(|&pos| table.outcomes[grid.replace(i, p, pos)].trades(p))
                        .count();
                    // monotone: sellers trade on a prefix, buyers on a suffix
                    let switch = match p {
                        Player::Seller(_) => trades,
                        Player::Buyer(_) => axis.len() - trades,
                    };
                    let (lower, upper, z) = if switch == 0 {
                        (Amount::ZERO, axis[0], Amount::ZERO)
                    } else if switch == axis.len() {
                        (axis[axis.len() - 1], Amount::ONE, Amount::ONE)
                    } else {
                        let (a, b) = (axis[switch - 1], axis[switch]);
                        (a, b, a.midpoint(b))
                    };
                    Threshold {
                        player: p,
                        context: grid.profile(i),
                        lower,
                        upper,
                        z,
                    }
                })
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Envelope identity with a left Riemann sum over the player's grid axis.
/// `tol` must be at least the grid step.
pub fn check_lemma1_envelope(
    mech: &dyn Mechanism,
    grid: &Grid,
    tol: Amount,
) -> Result<Vec<Violation>> {
    let step = grid.step();
    if tol < step {
        return Err(Error::Configuration(format!(
            "envelope tolerance {tol} is below the grid step {step}"
        )));
    }
    let table = OutcomeTable::build(mech, grid)?;
    scan(grid.profile_count(), |i| {
        let v = grid.profile(i);
        let mut found = Vec::new();
        for player in grid.shape().iter_players() {
            let axis = grid.axis(player);
            let column: Vec<Outcome> = (0..axis.len())
                .map(|pos| table.outcomes[grid.replace(i, player, pos)].clone())
                .collect();
            let extreme = extreme_outcome(mech, &v, player, axis, &column)?;
            let pos = grid.coordinate(i, player);
            found.extend(rules::envelope(&v, player, axis, pos, &column, &extreme, tol));
        }
        Ok(found)
    })
}

pub(crate) fn extreme_outcome(
    mech: &dyn Mechanism,
    v: &ValuationProfile,
    player: Player,
    axis: &[Amount],
    column: &[Outcome],
) -> Result<Outcome> {
    let worst = player.worst_type();
    match axis.binary_search(&worst) {
        Ok(pos) => Ok(column[pos].clone()),
        Err(_) => mech.evaluate(&v.with(player, worst)),
    }
}

/// Single-price structure: equal sides, one common price, zero transfers for
/// non-traders, traders on the right side of the price, and a price that
/// does not move when one trader's valuation moves within the same trader
/// set.
pub fn check_prop1_structure(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    let table = OutcomeTable::build(mech, grid)?;
    let mut found = scan(grid.profile_count(), |i| {
        Ok(rules::prop1_profile(&grid.profile(i), &table.outcomes[i]))
    })?;
    found.extend(table.unilateral(false, |v, i, player, pos, j| {
        let report = grid.axis(player)[pos];
        rules::prop1_independence(v, player, report, &table.outcomes[i], &table.outcomes[j])
    })?);
    found.sort();
    Ok(found)
}

/// One constant price per trader set across all grid profiles. The
/// reference for each trader set is the first profile, in canonical order,
/// where it clears at a common price.
pub fn check_prop2_structure(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    let table = OutcomeTable::build(mech, grid)?;
    let trader_sets: Vec<TraderSet> = table.outcomes.par_iter().map(Outcome::trader_set).collect();
    let mut reference: BTreeMap<&TraderSet, usize> = BTreeMap::new();
    for (i, t) in trader_sets.iter().enumerate() {
        if !t.is_empty() && rules::common_trader_price(&table.outcomes[i]).is_some() {
            reference.entry(t).or_insert(i);
        }
    }
    scan(grid.profile_count(), |i| {
        let t = &trader_sets[i];
        if t.is_empty() {
            return Ok(Vec::new());
        }
        let v = grid.profile(i);
        let out = &table.outcomes[i];
        if let Some(bad) = rules::prop2_profile(&v, out) {
            return Ok(vec![bad]);
        }
        let r = reference[t];
        let found = rules::prop2_pair(&grid.profile(r), &table.outcomes[r], &v, out);
        Ok(found.into_iter().collect())
    })
}

/// Lower-valued sellers and higher-valued buyers are served first, up to
/// price exclusion and declared rationing.
pub fn check_value_respecting(mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
    grid.check_shape(mech.shape())?;
    scan(grid.profile_count(), |i| {
        let v = grid.profile(i);
        let out = mech.evaluate(&v)?;
        let pool = mech.rationing_pool(&v)?;
        Ok(rules::value_respecting(&v, &out, pool.as_ref()))
    })
}
