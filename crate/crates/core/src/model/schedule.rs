use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::NetworkInstance;

/// Rate model a slot (or a whole schedule) is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Fixed rate `r`, SNR must reach `2^(r/W) - 1`.
    Constant,
    /// Shannon rate, slot long enough for `D_n` bits.
    Continuous,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Constant => "constant",
            Mode::Continuous => "continuous",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(Mode::Constant),
            "continuous" => Ok(Mode::Continuous),
            other => Err(format!("unknown mode `{other}` (expected constant|continuous)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transmission {
    pub user: usize,
    pub power_w: f64,
    pub duration_s: f64,
}

/// One concurrent-transmission group. A slot without transmissions is an
/// idle gap in which users only harvest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub duration_s: f64,
    pub mode: Mode,
    pub transmissions: Vec<Transmission>,
}

impl Slot {
    pub fn new(mode: Mode, duration_s: f64, members: &[usize], powers: &[f64]) -> Self {
        debug_assert_eq!(members.len(), powers.len());
        let transmissions = members
            .iter()
            .zip(powers)
            .map(|(&user, &power_w)| Transmission {
                user,
                power_w,
                duration_s,
            })
            .collect();
        Self {
            duration_s,
            mode,
            transmissions,
        }
    }

    pub fn idle(mode: Mode, duration_s: f64) -> Self {
        Self {
            duration_s,
            mode,
            transmissions: Vec::new(),
        }
    }

    pub fn is_idle(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn members(&self) -> Vec<usize> {
        self.transmissions.iter().map(|t| t.user).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.transmissions.iter().map(|t| t.power_w).collect()
    }
}

/// Ordered slots of one frame.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub total_s: f64,
    pub slots: Vec<Slot>,
}

impl Schedule {
    pub fn push(&mut self, slot: Slot) {
        self.total_s += slot.duration_s;
        self.slots.push(slot);
    }

    /// Non-idle slots only.
    pub fn transmitting_slots(&self) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(|s| !s.is_idle())
    }
}

/// Mutable bookkeeping of one scheduling run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleState {
    pub now_s: f64,
    pub battery_j: Vec<f64>,
    pub pending: BTreeSet<usize>,
}

impl ScheduleState {
    pub fn new(instance: &NetworkInstance) -> Self {
        Self {
            now_s: 0.0,
            battery_j: instance.battery_init_j.clone(),
            pending: (0..instance.num_users).collect(),
        }
    }

    /// Let time pass without transmissions.
    pub fn idle(&mut self, dt: f64, harvest_w: &[f64], cap_j: f64) {
        for (b, c) in self.battery_j.iter_mut().zip(harvest_w) {
            *b = (*b + c * dt).min(cap_j);
        }
        self.now_s += dt;
    }

    /// Apply a slot: everyone harvests for its whole duration, members also
    /// pay `P tau`. Batteries are clipped to `[0, cap]` at the boundary.
    pub fn commit(&mut self, slot: &Slot, harvest_w: &[f64], cap_j: f64) {
        let tau = slot.duration_s;
        let mut net: Vec<f64> = harvest_w.iter().map(|c| c * tau).collect();
        for t in &slot.transmissions {
            net[t.user] -= t.power_w * tau;
            self.pending.remove(&t.user);
        }
        for (b, e) in self.battery_j.iter_mut().zip(net) {
            *b = (*b + e).clamp(0.0, cap_j);
        }
        self.now_s += tau;
    }

    pub fn pending_vec(&self) -> Vec<usize> {
        self.pending.iter().copied().collect()
    }
}
