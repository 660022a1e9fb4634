//! Frame-level schedulers and the constraint validator.
//!
//! - [`crsa`]: constant rate, groups users by how much interference each can
//!   absorb at the power its battery affords.
//! - [`psa`]: continuous rate, grows each slot greedily while the slot
//!   penalty keeps falling below zero.
//! - [`mpa`] and [`mcns`]: single-user minimum-penalty and random
//!   one-per-cell baselines.

mod baselines;
mod crsa;
mod interference;
mod penalty;
mod psa;
mod validate;

pub use baselines::{mcns, mpa};
pub use crsa::{crsa, crsa_traced, CrsaAdmission, CrsaOptions, CrsaPowerRule, CrsaTrace};
pub use interference::{earliest_start, max_affordable_interference, pairwise_interference};
pub use penalty::{individual_penalties, penalty};
pub use psa::{psa, psa_traced, PsaSlotTrace, PsaStep, PsaTrace};
pub use validate::{validate_schedule, ConstraintChecks, ValidationReport, Violation};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{Mode, Scenario, Schedule};

/// The four schedulers by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Crsa,
    Psa,
    Mpa,
    Mcns,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Crsa, Algorithm::Psa, Algorithm::Mpa, Algorithm::Mcns];

    /// Rate model the algorithm's schedules are built and validated under.
    pub fn mode(self) -> Mode {
        match self {
            Algorithm::Crsa => Mode::Constant,
            _ => Mode::Continuous,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Crsa => "crsa",
            Algorithm::Psa => "psa",
            Algorithm::Mpa => "mpa",
            Algorithm::Mcns => "mcns",
        }
    }

    /// Runs the scheduler; `seed` only matters for MCNS.
    pub fn run(self, scn: &Scenario<'_>, seed: u64) -> Result<Schedule> {
        match self {
            Algorithm::Crsa => crsa(scn),
            Algorithm::Psa => psa(scn),
            Algorithm::Mpa => mpa(scn),
            Algorithm::Mcns => mcns(scn, seed),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "crsa" => Ok(Algorithm::Crsa),
            "psa" => Ok(Algorithm::Psa),
            "mpa" => Ok(Algorithm::Mpa),
            "mcns" => Ok(Algorithm::Mcns),
            other => Err(format!("unknown algorithm `{other}` (expected crsa|psa|mpa|mcns)")),
        }
    }
}

/// Lowest-index argmin/argmax helpers use `total_cmp` so NaNs cannot
/// silently reorder candidates.
pub(crate) fn by_value_then_index(a: (f64, usize), b: (f64, usize)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}
