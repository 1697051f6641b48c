use std::collections::BTreeSet;

use sha2::{Digest, Sha256};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::mechanism::Mechanism;
use crate::model::{MarketShape, Player, ValuationProfile};

/// Points per player on the default grid.
pub const DEFAULT_POINTS: usize = 11;

/// Upper bound on the number of profiles a grid may span.
pub const MAX_PROFILES: usize = 50_000_000;

/// A finite product set of valuations, one ascending axis per player.
///
/// Profiles are numbered in mixed radix with seller 1 most significant, so
/// index order is the lexicographic order of profiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    shape: MarketShape,
    axes: Vec<Vec<Amount>>,
    strides: Vec<usize>,
    count: usize,
}

/// Identifies the profile set a check ran over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridFingerprint {
    pub points_per_player: Vec<usize>,
    pub profiles: usize,
    /// SHA-256 over the canonical rendering of every axis.
    pub hash: String,
}

impl Grid {
    pub fn new(sellers: Vec<Vec<Amount>>, buyers: Vec<Vec<Amount>>) -> Result<Self> {
        let shape = MarketShape::new(sellers.len(), buyers.len())?;
        let axes: Vec<Vec<Amount>> = sellers.into_iter().chain(buyers).collect();
        for (k, axis) in axes.iter().enumerate() {
            let player = player_at(shape, k);
            if axis.is_empty() {
                return Err(Error::Configuration(format!("grid axis for {player} is empty")));
            }
            if let Some(bad) = axis.iter().find(|a| !a.is_unit()) {
                return Err(Error::Configuration(format!(
                    "grid point {bad} for {player} lies outside [0, 1]"
                )));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Configuration(format!(
                    "grid axis for {player} is not strictly ascending"
                )));
            }
        }
        let mut strides = vec![1usize; axes.len()];
        let mut count = 1usize;
        for k in (0..axes.len()).rev() {
            strides[k] = count;
            count = count
                .checked_mul(axes[k].len())
                .filter(|&c| c <= MAX_PROFILES)
                .ok_or_else(|| {
                    Error::Configuration(format!("grid spans more than {MAX_PROFILES} profiles"))
                })?;
        }
        Ok(Grid {
            shape,
            axes,
            strides,
            count,
        })
    }

    /// The same ascending point set for every player.
    pub fn same_points(shape: MarketShape, points: &[Amount]) -> Result<Self> {
        let axis: Vec<Amount> = points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        Grid::new(vec![axis.clone(); shape.sellers], vec![axis; shape.buyers])
    }

    /// `points` equispaced values `0, 1/(points-1), ..., 1` per player.
    pub fn uniform(shape: MarketShape, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Configuration("a uniform grid needs at least 2 points".into()));
        }
        let last = (points - 1) as i128;
        let axis: Vec<Amount> = (0..=last).map(|k| Amount::new(k, last)).collect();
        Grid::same_points(shape, &axis)
    }

    /// A uniform grid plus, for each posted price of the mechanism, the price
    /// itself and its neighbours half a step away on each side.
    pub fn for_mechanism(mech: &dyn Mechanism, points: usize) -> Result<Self> {
        let base = Grid::uniform(mech.shape(), points)?;
        let half_step = Amount::new(1, 2 * (points as i128 - 1));
        let mut extra = Vec::new();
        for price in mech.posted_prices() {
            extra.extend([price - half_step, price, price + half_step]);
        }
        Ok(base.with_points(&extra))
    }

    pub fn default_for(mech: &dyn Mechanism) -> Result<Self> {
        Grid::for_mechanism(mech, DEFAULT_POINTS)
    }

    /// Inserts the given points (those inside `[0, 1]`) on every axis.
    pub fn with_points(&self, points: &[Amount]) -> Grid {
        let axes: Vec<Vec<Amount>> = self
            .axes
            .iter()
            .map(|axis| {
                let mut set: BTreeSet<Amount> = axis.iter().copied().collect();
                set.extend(points.iter().copied().filter(Amount::is_unit));
                set.into_iter().collect()
            })
            .collect();
        let (s, b) = axes.split_at(self.shape.sellers);
        Grid::new(s.to_vec(), b.to_vec()).expect("adding unit points keeps a grid valid")
    }

    pub fn shape(&self) -> MarketShape {
        self.shape
    }

    pub fn axis(&self, player: Player) -> &[Amount] {
        &self.axes[self.shape.flat_index(player)]
    }

    pub fn profile_count(&self) -> usize {
        self.count
    }

    /// Position of the player's coordinate within `index`.
    pub fn coordinate(&self, index: usize, player: Player) -> usize {
        let k = self.shape.flat_index(player);
        (index / self.strides[k]) % self.axes[k].len()
    }

    /// The index of the profile that differs from `index` only in `player`'s
    /// coordinate, which becomes position `pos` on that player's axis.
    pub fn replace(&self, index: usize, player: Player, pos: usize) -> usize {
        let k = self.shape.flat_index(player);
        let cur = (index / self.strides[k]) % self.axes[k].len();
        index - cur * self.strides[k] + pos * self.strides[k]
    }

    pub fn profile(&self, index: usize) -> ValuationProfile {
        let values: Vec<Amount> = (0..self.axes.len())
            .map(|k| self.axes[k][(index / self.strides[k]) % self.axes[k].len()])
            .collect();
        ValuationProfile::from_flat(self.shape, &values).expect("grid points lie in [0, 1]")
    }

    pub fn profiles(&self) -> impl Iterator<Item = ValuationProfile> + '_ {
        (0..self.count).map(|i| self.profile(i))
    }

    /// Index of a profile whose every coordinate lies on the grid.
    pub fn index_of(&self, v: &ValuationProfile) -> Option<usize> {
        if v.shape() != self.shape {
            return None;
        }
        let mut index = 0;
        for player in self.shape.iter_players() {
            let k = self.shape.flat_index(player);
            let pos = self.axes[k].binary_search(&v.get(player)).ok()?;
            index += pos * self.strides[k];
        }
        Some(index)
    }

    /// Largest gap between consecutive points on any axis, counting the gaps
    /// from 0 to the first point and from the last point to 1.
    pub fn step(&self) -> Amount {
        self.axes
            .iter()
            .flat_map(|axis| {
                let inner = axis.windows(2).map(|w| w[1] - w[0]);
                let ends = [axis[0], Amount::ONE - axis[axis.len() - 1]];
                inner.chain(ends)
            })
            .max()
            .unwrap_or(Amount::ZERO)
    }

    pub fn check_shape(&self, shape: MarketShape) -> Result<()> {
        if self.shape != shape {
            return Err(Error::Dimension {
                expected: format!("grid for {shape}"),
                actual: format!("grid for {}", self.shape),
            });
        }
        Ok(())
    }

    pub fn fingerprint(&self) -> GridFingerprint {
        let mut hasher = Sha256::new();
        hasher.update(format!("m={};n={}\n", self.shape.sellers, self.shape.buyers));
        for axis in &self.axes {
            let line = axis.iter().map(Amount::to_string).collect::<Vec<_>>().join(",");
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        GridFingerprint {
            points_per_player: self.axes.iter().map(Vec::len).collect(),
            profiles: self.count,
            hash: hex::encode(hasher.finalize()),
        }
    }
}

fn player_at(shape: MarketShape, k: usize) -> Player {
    if k < shape.sellers {
        Player::Seller(k)
    } else {
        Player::Buyer(k - shape.sellers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amount::dec;
    use crate::mechanisms::PostedPrice;

    fn shape(m: usize, n: usize) -> MarketShape {
        MarketShape::new(m, n).unwrap()
    }

    #[test]
    fn index_order_is_lexicographic() {
        let g = Grid::uniform(shape(2, 1), 3).unwrap();
        assert_eq!(g.profile_count(), 27);
        let all: Vec<_> = g.profiles().collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
        for (i, v) in all.iter().enumerate() {
            assert_eq!(g.index_of(v), Some(i));
        }
    }

    #[test]
    fn replace_moves_one_coordinate() {
        let g = Grid::uniform(shape(2, 2), 4).unwrap();
        let i = 37;
        let v = g.profile(i);
        for p in shape(2, 2).iter_players() {
            for pos in 0..4 {
                let j = g.replace(i, p, pos);
                assert_eq!(g.profile(j), v.with(p, g.axis(p)[pos]));
                assert_eq!(g.coordinate(j, p), pos);
            }
        }
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Grid::new(vec![vec![]], vec![vec![Amount::ZERO]]).is_err());
        assert!(Grid::new(vec![vec![dec("0.5"), dec("0.5")]], vec![vec![Amount::ZERO]]).is_err());
        assert!(Grid::new(vec![vec![dec("0.6"), dec("0.5")]], vec![vec![Amount::ZERO]]).is_err());
        assert!(Grid::new(vec![vec![dec("1.5")]], vec![vec![Amount::ZERO]]).is_err());
        assert!(Grid::uniform(shape(20, 20), 11).is_err());
    }

    #[test]
    fn default_grid_straddles_prices() {
        let m = PostedPrice::new(dec("0.25")).unwrap();
        let g = Grid::default_for(&m).unwrap();
        let axis = g.axis(Player::Seller(0));
        assert_eq!(axis.len(), 12);
        for p in ["0.2", "0.25", "0.3"] {
            assert!(axis.contains(&dec(p)));
        }
        let m = PostedPrice::new(dec("0.33")).unwrap();
        let axis = Grid::default_for(&m).unwrap().axis(Player::Buyer(0)).to_vec();
        for p in ["0.28", "0.33", "0.38"] {
            assert!(axis.contains(&dec(p)));
        }
    }

    #[test]
    fn step_counts_end_gaps() {
        let pts: Vec<Amount> = ["0.05", "0.1", "0.3", "0.5", "0.7", "0.95"].iter().map(|p| dec(p)).collect();
        let g = Grid::same_points(shape(1, 1), &pts).unwrap();
        assert_eq!(g.step(), dec("0.25"));
        assert_eq!(Grid::uniform(shape(1, 1), 11).unwrap().step(), dec("0.1"));
    }

    #[test]
    fn fingerprint_tracks_points() {
        let a = Grid::uniform(shape(1, 2), 11).unwrap();
        let b = a.with_points(&[dec("0.55")]);
        assert_ne!(a.fingerprint().hash, b.fingerprint().hash);
        assert_eq!(a.fingerprint(), Grid::uniform(shape(1, 2), 11).unwrap().fingerprint());
        assert_eq!(b.fingerprint().points_per_player, vec![12, 12, 12]);
    }
}
