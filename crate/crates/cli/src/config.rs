//! Mechanism and grid configuration files.
//!
//! ```toml
//! kind = "linear_price"
//! c = ["0", "0"]
//! d = ["1", "0", "0"]
//! beta = [2, 1, 3]          # one-based, first entry is served first
//! ```
//!
//! Numbers are decimal strings so they convert exactly. Player indices and
//! priority permutations are one-based, as in rendered reports.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use dauction::mechanisms::{
    make_bilateral_posted_price, make_example1, make_example2, make_example3, make_example4,
    make_generalized_posted_price, make_linear_price, FirstProfitable, LinearPrice,
    LinearPriceParams, PostedOffer, DEFAULT_FALLBACK_PRICE,
};
use dauction::{Amount, Grid, MarketShape, Mechanism, TraderSet};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MechanismConfig {
    BilateralPosted {
        price: String,
    },
    Example1 {
        price1: String,
        price2: String,
    },
    Example2 {
        seller_price: String,
        buyer_price: String,
    },
    Example3,
    Example4 {
        primary_price: String,
        secondary_price: String,
    },
    GeneralizedPosted {
        sellers: usize,
        buyers: usize,
        price_map: Vec<PriceEntry>,
    },
    LinearPrice {
        c: Vec<String>,
        d: Vec<String>,
        sigma: Option<Vec<usize>>,
        beta: Option<Vec<usize>>,
        fallback_price: Option<String>,
    },
}

/// One trader set of a generalized posted price, one-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceEntry {
    pub sellers: Vec<usize>,
    pub buyers: Vec<usize>,
    pub price: String,
}

/// A built mechanism. Linear price is kept concrete so `run` can show its
/// trace.
pub enum Configured {
    Linear(LinearPrice),
    Other(Box<dyn Mechanism>),
}

impl Configured {
    pub fn mechanism(&self) -> &dyn Mechanism {
        match self {
            Configured::Linear(m) => m,
            Configured::Other(m) => m.as_ref(),
        }
    }
}

pub fn amount(field: &str, text: &str) -> CliResult<Amount> {
    text.parse()
        .map_err(|e| CliError::Usage(format!("{field}: {e}")))
}

fn amounts(field: &str, texts: &[String]) -> CliResult<Vec<Amount>> {
    texts.iter().map(|t| amount(field, t)).collect()
}

fn zero_based(field: &str, labels: &[usize]) -> CliResult<Vec<usize>> {
    labels
        .iter()
        .map(|&k| {
            k.checked_sub(1)
                .ok_or_else(|| CliError::Usage(format!("{field}: indices start at 1")))
        })
        .collect()
}

impl MechanismConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Toml {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn build(&self) -> CliResult<Configured> {
        let boxed = |m: Box<dyn Mechanism>| Ok(Configured::Other(m));
        match self {
            MechanismConfig::BilateralPosted { price } => {
                boxed(Box::new(make_bilateral_posted_price(amount("price", price)?)?))
            }
            MechanismConfig::Example1 { price1, price2 } => boxed(Box::new(make_example1(
                amount("price1", price1)?,
                amount("price2", price2)?,
            )?)),
            MechanismConfig::Example2 {
                seller_price,
                buyer_price,
            } => boxed(Box::new(make_example2(
                amount("seller_price", seller_price)?,
                amount("buyer_price", buyer_price)?,
            )?)),
            MechanismConfig::Example3 => boxed(Box::new(make_example3())),
            MechanismConfig::Example4 {
                primary_price,
                secondary_price,
            } => boxed(Box::new(make_example4(
                amount("primary_price", primary_price)?,
                amount("secondary_price", secondary_price)?,
            )?)),
            MechanismConfig::GeneralizedPosted {
                sellers,
                buyers,
                price_map,
            } => {
                let shape = MarketShape::new(*sellers, *buyers)?;
                let offers = price_map
                    .iter()
                    .map(|e| {
                        let traders = TraderSet::new(
                            zero_based("price_map.sellers", &e.sellers)?,
                            zero_based("price_map.buyers", &e.buyers)?,
                        );
                        Ok(PostedOffer::new(traders, amount("price_map.price", &e.price)?))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                boxed(Box::new(make_generalized_posted_price(
                    shape,
                    offers,
                    Arc::new(FirstProfitable),
                )?))
            }
            MechanismConfig::LinearPrice {
                c,
                d,
                sigma,
                beta,
                fallback_price,
            } => {
                let c = amounts("c", c)?;
                let d = amounts("d", d)?;
                let (m, n) = (c.len(), d.len());
                let sigma = match sigma {
                    Some(p) => zero_based("sigma", p)?,
                    None => (0..m).collect(),
                };
                let beta = match beta {
                    Some(p) => zero_based("beta", p)?,
                    None => (0..n).collect(),
                };
                let fallback = match fallback_price {
                    Some(t) => amount("fallback_price", t)?,
                    None => DEFAULT_FALLBACK_PRICE,
                };
                let params = LinearPriceParams::new(c, d)
                    .with_priorities(sigma, beta)
                    .with_fallback(fallback);
                Ok(Configured::Linear(make_linear_price(params)?))
            }
        }
    }
}

/// Which profiles to scan.
///
/// * nothing: the default grid, 11 points plus price neighbours;
/// * `points = N`: N equispaced points plus price neighbours;
/// * `axis = [..]`: the same explicit points for every player;
/// * `sellers = [[..], ..]` and `buyers = [[..], ..]`: one list per player.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    pub axis: Option<Vec<String>>,
    pub sellers: Option<Vec<Vec<String>>>,
    pub buyers: Option<Vec<Vec<String>>>,
}

impl GridConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Toml {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn build(&self, mech: &dyn Mechanism) -> CliResult<Grid> {
        let lists = |field: &str, xs: &[Vec<String>]| -> CliResult<Vec<Vec<Amount>>> {
            xs.iter().map(|axis| amounts(field, axis)).collect()
        };
        let grid = match (self.points, &self.axis, &self.sellers, &self.buyers) {
            (None, None, None, None) => Grid::default_for(mech)?,
            (Some(n), None, None, None) => Grid::for_mechanism(mech, n)?,
            (None, Some(axis), None, None) => Grid::same_points(mech.shape(), &amounts("axis", axis)?)?,
            (None, None, Some(s), Some(b)) => Grid::new(lists("sellers", s)?, lists("buyers", b)?)?,
            _ => {
                return Err(CliError::Usage(
                    "grid: give exactly one of `points`, `axis`, or `sellers` with `buyers`".into(),
                ))
            }
        };
        grid.check_shape(mech.shape())?;
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dauction::{dec, ValuationProfile};

    fn parse(text: &str) -> CliResult<MechanismConfig> {
        MechanismConfig::parse(text, Path::new("test.toml"))
    }

    #[test]
    fn every_kind_builds() {
        let texts = [
            "kind = \"bilateral_posted\"\nprice = \"0.5\"",
            "kind = \"example1\"\nprice1 = \"0.3\"\nprice2 = \"0.6\"",
            "kind = \"example2\"\nseller_price = \"0.3\"\nbuyer_price = \"0.6\"",
            "kind = \"example3\"",
            "kind = \"example4\"\nprimary_price = \"0.6\"\nsecondary_price = \"0.3\"",
            "kind = \"generalized_posted\"\nsellers = 1\nbuyers = 2\n\
             [[price_map]]\nsellers = [1]\nbuyers = [1]\nprice = \"0.6\"\n\
             [[price_map]]\nsellers = [1]\nbuyers = [2]\nprice = \"0.3\"",
            "kind = \"linear_price\"\nc = [\"0\", \"0\"]\nd = [\"1\", \"0\", \"0\"]\nbeta = [2, 1, 3]",
        ];
        let names = [
            "bilateral_posted",
            "example1",
            "example2",
            "example3",
            "example4",
            "generalized_posted",
            "linear_price",
        ];
        for (text, name) in texts.iter().zip(names) {
            let built = parse(text).unwrap().build().unwrap();
            assert_eq!(built.mechanism().name(), name);
        }
    }

    #[test]
    fn linear_price_priorities_are_one_based() {
        let cfg = parse("kind = \"linear_price\"\nc = [\"0\", \"0\"]\nd = [\"1\", \"0\", \"0\"]\nbeta = [2, 1, 3]")
            .unwrap();
        let Configured::Linear(m) = cfg.build().unwrap() else { panic!("not linear") };
        assert_eq!(m.params().buyer_priority, vec![1, 0, 2]);
        let v = ValuationProfile::new(vec![dec("0.05"), dec("0.5")], vec![dec("0.7"), dec("0.95"), dec("0.1")])
            .unwrap();
        assert!(m.evaluate(&v).unwrap().buyer_trades[1]);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "kind = \"bilateral_posted\"\nprice = 0.5",
            "kind = \"bilateral_posted\"\nprice = \"1.5\"",
            "kind = \"bilateral_posted\"\nprice = \"0.5\"\nextra = 1",
            "kind = \"example2\"\nseller_price = \"0.6\"\nbuyer_price = \"0.3\"",
            "kind = \"linear_price\"\nc = [\"0.6\"]\nd = [\"0.6\"]",
            "kind = \"linear_price\"\nc = [\"0\"]\nd = [\"1\"]\nsigma = [0]",
            "kind = \"generalized_posted\"\nsellers = 1\nbuyers = 1\n\
             [[price_map]]\nsellers = [1]\nbuyers = []\nprice = \"0.5\"",
            "kind = \"vickrey\"",
            "not toml at all [",
        ] {
            assert!(parse(text).and_then(|c| c.build()).is_err(), "{text}");
        }
    }

    #[test]
    fn grid_forms() {
        let m = make_bilateral_posted_price(dec("0.5")).unwrap();
        assert_eq!(GridConfig::default().build(&m).unwrap().profile_count(), 13 * 13);
        let g: GridConfig = toml::from_str("points = 3").unwrap();
        assert_eq!(g.build(&m).unwrap().profile_count(), 5 * 5);
        let g: GridConfig = toml::from_str("axis = [\"0\", \"1\"]").unwrap();
        assert_eq!(g.build(&m).unwrap().profile_count(), 4);
        let g: GridConfig =
            toml::from_str("sellers = [[\"0\", \"1\"]]\nbuyers = [[\"0\", \"0.5\", \"1\"]]").unwrap();
        assert_eq!(g.build(&m).unwrap().profile_count(), 6);
        let g: GridConfig = toml::from_str("sellers = [[\"0\"]]\nbuyers = [[\"0\"], [\"1\"]]").unwrap();
        assert!(g.build(&m).is_err());
        let g: GridConfig = toml::from_str("points = 3\naxis = [\"0\"]").unwrap();
        assert!(g.build(&m).is_err());
    }
}
