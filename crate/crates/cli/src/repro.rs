//! Golden scenarios: each pairs a mechanism and grid with the verdicts it
//! must produce. The built-in set lives in `scenarios.toml`; `repro
//! --scenarios` swaps in another file with the same schema.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use dauction::search::{default_report_grid, mine_ic_failures};
use dauction::verify::Check;
use dauction::{Amount, Deviation, Player, ValuationProfile, Violation};
use serde::Deserialize;

use crate::config::{amount, Configured, GridConfig, MechanismConfig};
use crate::error::{CliError, CliResult};

pub const BUILTIN: &str = include_str!("../scenarios.toml");

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Vec<Scenario>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub mechanism: MechanismConfig,
    #[serde(default)]
    pub grid: GridConfig,
    /// Checks that must report nothing.
    #[serde(default)]
    pub clean: Vec<String>,
    #[serde(default)]
    pub flags: Vec<Witness>,
    /// Patterns the deviation miner must match.
    #[serde(default)]
    pub mines: Vec<Witness>,
    #[serde(default)]
    pub evaluate: Vec<Evaluation>,
}

/// Matches a violation or deviation. Omitted fields match anything;
/// `evidence` entries must equal the rendered evidence fields.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub check: Option<String>,
    pub sellers: Option<Vec<String>>,
    pub buyers: Option<Vec<String>>,
    pub player: Option<String>,
    pub deviation: Option<String>,
    #[serde(default)]
    pub evidence: BTreeMap<String, String>,
}

/// Direct evaluation at one profile.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evaluation {
    pub sellers: Vec<String>,
    pub buyers: Vec<String>,
    pub kappa: Option<usize>,
    pub price: Option<String>,
    pub trading_sellers: Vec<usize>,
    pub trading_buyers: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub scenario: String,
    pub expectation: String,
    pub passed: bool,
    pub detail: String,
}

impl ScenarioFile {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Toml {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN, Path::new("scenarios.toml")).expect("built-in scenarios parse")
    }

    pub fn names(&self) -> Vec<&str> {
        self.scenario.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn run(&self) -> Vec<Row> {
        self.scenario.iter().flat_map(Scenario::run).collect()
    }
}

fn profile(sellers: &[String], buyers: &[String]) -> CliResult<ValuationProfile> {
    let parse = |xs: &[String]| xs.iter().map(|x| amount("profile", x)).collect::<CliResult<Vec<_>>>();
    Ok(ValuationProfile::new(parse(sellers)?, parse(buyers)?)?)
}

/// The parts of a witness that a pattern can pin down.
struct Candidate {
    profile: ValuationProfile,
    player: Option<Player>,
    deviation: Option<Amount>,
    evidence: BTreeMap<String, String>,
}

impl From<&Violation> for Candidate {
    fn from(w: &Violation) -> Self {
        Candidate {
            profile: w.profile.clone(),
            player: w.player,
            deviation: w.deviation,
            evidence: w.evidence.fields().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl From<&Deviation> for Candidate {
    fn from(d: &Deviation) -> Self {
        Candidate {
            profile: d.profile.clone(),
            player: Some(d.player),
            deviation: Some(d.report),
            evidence: [("gain".to_string(), d.gain.to_string())].into(),
        }
    }
}

impl Witness {
    fn describe(&self) -> String {
        let mut parts = vec![self.check.clone().unwrap_or_else(|| "mine".into())];
        if let (Some(s), Some(b)) = (&self.sellers, &self.buyers) {
            parts.push(format!("s=({}) b=({})", s.join(","), b.join(",")));
        }
        if let Some(p) = &self.player {
            parts.push(p.clone());
        }
        if let Some(d) = &self.deviation {
            parts.push(format!("report {d}"));
        }
        for (k, v) in &self.evidence {
            parts.push(format!("{k}={v}"));
        }
        parts.join(" ")
    }

    fn matches(&self, c: &Candidate) -> CliResult<bool> {
        if let (Some(s), Some(b)) = (&self.sellers, &self.buyers) {
            if profile(s, b)? != c.profile {
                return Ok(false);
            }
        }
        if let Some(p) = &self.player {
            if Some(p.parse::<Player>()?) != c.player {
                return Ok(false);
            }
        }
        if let Some(d) = &self.deviation {
            if Some(amount("deviation", d)?) != c.deviation {
                return Ok(false);
            }
        }
        for (k, want) in &self.evidence {
            let got = c.evidence.get(k);
            // compare numerically when both sides are numbers
            let equal = match (got, want.parse::<Amount>()) {
                (Some(g), Ok(w)) => g.parse::<Amount>().map(|g| g == w).unwrap_or(g == want),
                (Some(g), Err(_)) => g == want,
                (None, _) => false,
            };
            if !equal {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Evaluation {
    fn describe(&self) -> String {
        format!("evaluate s=({}) b=({})", self.sellers.join(","), self.buyers.join(","))
    }

    fn verify(&self, built: &Configured) -> CliResult<(bool, String)> {
        let mech = built.mechanism();
        let v = profile(&self.sellers, &self.buyers)?;
        let out = mech.evaluate(&v)?;
        let traders = out.trader_set();
        let want_sellers: Vec<usize> = self.trading_sellers.iter().map(|k| k.wrapping_sub(1)).collect();
        let want_buyers: Vec<usize> = self.trading_buyers.iter().map(|k| k.wrapping_sub(1)).collect();
        let mut problems = Vec::new();
        if traders.sellers.iter().copied().collect::<Vec<_>>() != want_sellers
            || traders.buyers.iter().copied().collect::<Vec<_>>() != want_buyers
        {
            problems.push(format!("traders {traders}"));
        }
        if let Some(price) = &self.price {
            let price = amount("price", price)?;
            let wrong = mech.shape().iter_players().any(|p| {
                let expected = if out.trades(p) { price } else { Amount::ZERO };
                out.transfer(p) != expected
            });
            if wrong {
                problems.push(format!("transfers differ from {price} for traders and 0 otherwise"));
            }
        }
        if let Some(kappa) = self.kappa {
            match built {
                Configured::Linear(lp) => {
                    let got = lp.trace(&v)?.stats.kappa;
                    if got != kappa {
                        problems.push(format!("kappa {got}"));
                    }
                }
                Configured::Other(_) => problems.push("kappa needs a linear price mechanism".into()),
            }
        }
        Ok((problems.is_empty(), problems.join("; ")))
    }
}

impl Scenario {
    pub fn run(&self) -> Vec<Row> {
        let row = |expectation: String, result: CliResult<(bool, String)>| {
            let (passed, detail) = result.unwrap_or_else(|e| (false, e.to_string()));
            Row {
                scenario: self.name.clone(),
                expectation,
                passed,
                detail,
            }
        };
        let setup = self.mechanism.build().and_then(|built| {
            let grid = self.grid.build(built.mechanism())?;
            Ok((built, grid))
        });
        let (built, grid) = match setup {
            Ok(x) => x,
            Err(e) => return vec![row("setup".into(), Err(e))],
        };
        let mech = built.mechanism();
        let mut cache: HashMap<Check, CliResult<Vec<Violation>>> = HashMap::new();
        let mut run_check = |name: &str| -> CliResult<Vec<Violation>> {
            let check: Check = name.parse()?;
            match cache.entry(check).or_insert_with(|| check.run(mech, &grid).map_err(Into::into)) {
                Ok(found) => Ok(found.clone()),
                Err(e) => Err(CliError::Usage(e.to_string())),
            }
        };

        let mut rows = Vec::new();
        for rule in &self.evaluate {
            rows.push(row(rule.describe(), rule.verify(&built)));
        }
        for name in &self.clean {
            let result = run_check(name).map(|found| match found.first() {
                None => (true, String::new()),
                Some(w) => (false, format!("{} violations, first: {w}", found.len())),
            });
            rows.push(row(format!("{name} clean"), result));
        }
        for w in &self.flags {
            let result = (|| {
                let name = w
                    .check
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("flags entries need a `check`".into()))?;
                let found = run_check(name)?;
                for v in &found {
                    if w.matches(&Candidate::from(v))? {
                        return Ok((true, v.to_string()));
                    }
                }
                Ok((false, format!("no match among {} violations", found.len())))
            })();
            rows.push(row(w.describe(), result));
        }
        if !self.mines.is_empty() {
            let mined = mine_ic_failures(mech, &grid, &default_report_grid(&grid));
            for w in &self.mines {
                let result = (|| {
                    let mined = mined.as_ref().map_err(|e| CliError::Usage(e.to_string()))?;
                    for d in mined {
                        if w.matches(&Candidate::from(d))? {
                            let replayed = d.replay(mech)?;
                            return Ok((replayed, format!("report {} gain {}", d.report, d.gain)));
                        }
                    }
                    Ok((false, format!("no match among {} deviations", mined.len())))
                })();
                rows.push(row(w.describe(), result));
            }
        }
        rows
    }
}

pub fn render(rows: &[Row]) -> String {
    let width = |f: fn(&Row) -> &str| rows.iter().map(|r| f(r).len()).max().unwrap_or(0);
    let ws = width(|r| &r.scenario).max("scenario".len());
    let we = width(|r| &r.expectation).max("expectation".len());
    let mut out = format!("{:ws$}  {:we$}  result\n", "scenario", "expectation");
    for r in rows {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        out.push_str(&format!("{:ws$}  {:we$}  {verdict}", r.scenario, r.expectation));
        if !r.passed && !r.detail.is_empty() {
            out.push_str(&format!("  ({})", r.detail));
        }
        out.push('\n');
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    out.push_str(&format!("{} of {} expectations hold\n", rows.len() - failed, rows.len()));
    out
}
