//! Machine-readable check and mine reports.
//!
//! Decimals are strings so they round-trip exactly. Nothing in a report
//! depends on thread count; wall-clock timing is only recorded on request.

use std::collections::BTreeMap;

use dauction::verify::GridFingerprint;
use dauction::{Deviation, Grid, Mechanism, ValuationProfile, Violation};
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub mechanism: MechanismEcho,
    pub grid: GridEcho,
    pub results: Vec<PropertyResult>,
    pub total_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismEcho {
    pub name: String,
    pub sellers: usize,
    pub buyers: usize,
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEcho {
    pub points_per_player: Vec<usize>,
    pub profiles: usize,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub property: String,
    pub status: Status,
    /// All violations found, before truncation.
    pub violation_count: usize,
    pub truncated: bool,
    pub violations: Vec<Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// One witness, flattened to strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub property: String,
    pub sellers: Vec<String>,
    pub buyers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub player: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<String>,
    pub evidence: BTreeMap<String, String>,
}

fn strings(v: &ValuationProfile) -> (Vec<String>, Vec<String>) {
    let f = |xs: &[dauction::Amount]| xs.iter().map(ToString::to_string).collect();
    (f(v.sellers()), f(v.buyers()))
}

impl From<&Violation> for Record {
    fn from(w: &Violation) -> Self {
        let (sellers, buyers) = strings(&w.profile);
        Record {
            property: w.property.code().to_string(),
            sellers,
            buyers,
            player: w.player.map(|p| p.to_string()),
            deviation: w.deviation.map(|d| d.to_string()),
            evidence: w
                .evidence
                .fields()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

impl From<&Deviation> for Record {
    fn from(d: &Deviation) -> Self {
        let (sellers, buyers) = strings(&d.profile);
        let mut evidence = BTreeMap::new();
        evidence.insert("gain".to_string(), d.gain.to_string());
        Record {
            property: "IC".into(),
            sellers,
            buyers,
            player: Some(d.player.to_string()),
            deviation: Some(d.report.to_string()),
            evidence,
        }
    }
}

impl MechanismEcho {
    pub fn of(mech: &dyn Mechanism) -> Self {
        let shape = mech.shape();
        MechanismEcho {
            name: mech.name().to_string(),
            sellers: shape.sellers,
            buyers: shape.buyers,
            params: mech.params().into_iter().collect(),
        }
    }
}

impl From<GridFingerprint> for GridEcho {
    fn from(f: GridFingerprint) -> Self {
        GridEcho {
            points_per_player: f.points_per_player,
            profiles: f.profiles,
            sha256: f.hash,
        }
    }
}

impl PropertyResult {
    /// Keeps the first `cap` records in canonical order.
    pub fn new<'a, T>(property: &str, found: &'a [T], cap: usize, elapsed_ms: Option<u64>) -> Self
    where
        Record: From<&'a T>,
    {
        PropertyResult {
            property: property.to_string(),
            status: if found.is_empty() { Status::Pass } else { Status::Fail },
            violation_count: found.len(),
            truncated: found.len() > cap,
            violations: found.iter().take(cap).map(Record::from).collect(),
            elapsed_ms,
        }
    }
}

impl Report {
    pub fn new(command: &str, mech: &dyn Mechanism, grid: &Grid, results: Vec<PropertyResult>) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            mechanism: MechanismEcho::of(mech),
            grid: grid.fingerprint().into(),
            total_violations: results.iter().map(|r| r.violation_count).sum(),
            results,
        }
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Pass)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dauction::mechanisms::make_example3;
    use dauction::verify::Check;

    #[test]
    fn round_trip_and_truncation() {
        let m = make_example3();
        let g = Grid::uniform(m.shape(), 6).unwrap();
        let found = Check::A3.run(&m, &g).unwrap();
        assert!(found.len() > 3);
        let results = vec![
            PropertyResult::new("ic", &Check::Ic.run(&m, &g).unwrap(), 3, None),
            PropertyResult::new("a3", &found, 3, Some(12)),
        ];
        let report = Report::new("check", &m, &g, results);
        assert!(!report.passed());
        assert_eq!(report.results[0].status, Status::Pass);
        assert!(report.results[0].violations.is_empty());
        assert_eq!(report.results[1].violations.len(), 3);
        assert!(report.results[1].truncated);
        assert_eq!(report.total_violations, found.len());
        let text = report.to_json().unwrap();
        assert_eq!(Report::from_json(&text).unwrap(), report);
        assert!(!text.contains("elapsed_ms\": null"));
    }
}
