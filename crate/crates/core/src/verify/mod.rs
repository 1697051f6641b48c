//! Exhaustive grid checkers for the robustness properties, the auxiliary
//! assumptions and the structural characterizations.
//!
//! Every checker quantifies over grid points only: an empty result is
//! evidence at grid resolution, not a proof over `[0, 1]^(m+n)`. Results are
//! sorted canonically (profile, then player, then deviation) and do not
//! depend on the number of worker threads.

mod checks;
mod grid;
mod replay;
pub mod rules;
mod violation;

use std::fmt;
use std::str::FromStr;

pub use checks::{
    check_a1_common_price, check_a2_worst_type, check_a3_nonbossy, check_bb, check_ic, check_ir,
    check_lemma1_envelope, check_lemma1_monotone, check_nw, check_prop1_structure,
    check_prop2_structure, check_value_respecting, extract_thresholds, Threshold,
};
pub use grid::{Grid, GridFingerprint, DEFAULT_POINTS, MAX_PROFILES};
pub use violation::{Evidence, Property, Violation};

use crate::error::{Error, Result};
use crate::mechanism::Mechanism;

/// A named checker, as selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Ic,
    Ir,
    Bb,
    Nw,
    A1,
    A2,
    A3,
    /// Monotonicity and the envelope identity, with tolerance equal to the
    /// grid step.
    Lemma1,
    Prop1,
    Prop2,
    ValueRespecting,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Ic,
        Check::Ir,
        Check::Bb,
        Check::Nw,
        Check::A1,
        Check::A2,
        Check::A3,
        Check::Lemma1,
        Check::Prop1,
        Check::Prop2,
        Check::ValueRespecting,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Ic => "ic",
            Check::Ir => "ir",
            Check::Bb => "bb",
            Check::Nw => "nw",
            Check::A1 => "a1",
            Check::A2 => "a2",
            Check::A3 => "a3",
            Check::Lemma1 => "lemma1",
            Check::Prop1 => "prop1",
            Check::Prop2 => "prop2",
            Check::ValueRespecting => "value_respecting",
        }
    }

    pub fn run(&self, mech: &dyn Mechanism, grid: &Grid) -> Result<Vec<Violation>> {
        match self {
            Check::Ic => check_ic(mech, grid),
            Check::Ir => check_ir(mech, grid),
            Check::Bb => check_bb(mech, grid),
            Check::Nw => check_nw(mech, grid),
            Check::A1 => check_a1_common_price(mech, grid),
            Check::A2 => check_a2_worst_type(mech, grid),
            Check::A3 => check_a3_nonbossy(mech, grid),
            Check::Lemma1 => {
                let mut found = check_lemma1_monotone(mech, grid)?;
                found.extend(check_lemma1_envelope(mech, grid, grid.step())?);
                found.sort();
                Ok(found)
            }
            Check::Prop1 => check_prop1_structure(mech, grid),
            Check::Prop2 => check_prop2_structure(mech, grid),
            Check::ValueRespecting => check_value_respecting(mech, grid),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Check::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown property `{s}`")))
    }
}
