use serde::{Deserialize, Serialize};

use crate::model::{harvest_rate, Slot};
use crate::model::{rate_continuous, snr, EhConfig, Mode, NetworkInstance, RadioConfig, Schedule, ScheduleState};
use crate::powerctl::ENERGY_REL_TOL;

/// Slack on the SNR threshold, relative.
const SNR_REL_TOL: f64 = 1e-9;
/// Slack on delivered bits in the continuous model, absolute.
const BITS_ABS_TOL: f64 = 1e-6;
/// Slack on `r tau >= D`, relative (the slot is exactly `D / r`).
const CONST_BITS_REL_TOL: f64 = 1e-12;

/// One boolean per constraint family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintChecks {
    pub each_user_once: bool,
    pub one_user_per_cell: bool,
    pub demand_met: bool,
    pub snr_threshold: bool,
    pub max_power: bool,
    pub energy_causality: bool,
    pub positive_slots: bool,
}

impl ConstraintChecks {
    fn all_ok() -> Self {
        Self {
            each_user_once: true,
            one_user_per_cell: true,
            demand_met: true,
            snr_threshold: true,
            max_power: true,
            energy_causality: true,
            positive_slots: true,
        }
    }

    pub fn all(&self) -> bool {
        self.each_user_once
            && self.one_user_per_cell
            && self.demand_met
            && self.snr_threshold
            && self.max_power
            && self.energy_causality
            && self.positive_slots
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub slot: Option<usize>,
    pub user: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub mode: Mode,
    pub checks: ConstraintChecks,
    pub first_violation: Option<Violation>,
    pub violations: usize,
}

impl ValidationReport {
    pub fn verdict(&self) -> &'static str {
        if self.valid {
            "valid"
        } else {
            "invalid"
        }
    }
}

struct Collector {
    checks: ConstraintChecks,
    first: Option<Violation>,
    count: usize,
}

impl Collector {
    fn flag(
        &mut self,
        which: fn(&mut ConstraintChecks) -> &mut bool,
        name: &str,
        slot: Option<usize>,
        user: Option<usize>,
        detail: String,
    ) {
        *which(&mut self.checks) = false;
        self.count += 1;
        if self.first.is_none() {
            self.first = Some(Violation {
                constraint: name.to_string(),
                slot,
                user,
                detail,
            });
        }
    }
}

/// Checks a schedule against the full constraint set of the given rate
/// model, replaying batteries slot by slot (harvest in every slot, idle ones
/// included, spend in the member's own slot, clip to `[0, B_max]`).
///
/// Harvesting rates are recomputed from the instance here rather than taken
/// from a scheduler's cache.
pub fn validate_schedule(
    schedule: &Schedule,
    instance: &NetworkInstance,
    radio: &RadioConfig,
    eh: &EhConfig,
    mode: Mode,
) -> ValidationReport {
    let mut col = Collector {
        checks: ConstraintChecks::all_ok(),
        first: None,
        count: 0,
    };
    let n_users = instance.num_users;
    let harvest: Vec<f64> = (0..n_users).map(|n| harvest_rate(n, instance, eh, radio)).collect();
    let gamma = radio.constant_rate_gamma();
    let mut seen = vec![0usize; n_users];
    let mut state = ScheduleState::new(instance);

    for (m, slot) in schedule.slots.iter().enumerate() {
        let tau = slot.duration_s;
        if !(tau.is_finite() && tau > 0.0) {
            col.flag(
                |c| &mut c.positive_slots,
                "positive_slots",
                Some(m),
                None,
                format!("slot length {tau}"),
            );
        }
        let members = slot.members();
        if members.iter().any(|&u| u >= n_users) {
            col.flag(
                |c| &mut c.each_user_once,
                "each_user_once",
                Some(m),
                None,
                "unknown user index".into(),
            );
            continue;
        }
        let powers = slot.powers();
        let mut cell_used = vec![false; instance.num_haps];
        for (&u, &p) in members.iter().zip(&powers) {
            seen[u] += 1;
            let k = instance.hap_of[u];
            if cell_used[k] {
                col.flag(
                    |c| &mut c.one_user_per_cell,
                    "one_user_per_cell",
                    Some(m),
                    Some(u),
                    format!("second user of cell {k}"),
                );
            }
            cell_used[k] = true;
            if !(p > 0.0 && p <= radio.pmax_w) {
                col.flag(
                    |c| &mut c.max_power,
                    "max_power",
                    Some(m),
                    Some(u),
                    format!("power {p:e} W outside (0, {:e}]", radio.pmax_w),
                );
            }
        }
        check_rates(&mut col, m, slot, &members, &powers, instance, radio, mode, gamma);
        for (&u, &p) in members.iter().zip(&powers) {
            let spend = p * tau;
            let avail = state.battery_j[u] + harvest[u] * tau;
            if avail - spend < -ENERGY_REL_TOL * spend {
                col.flag(
                    |c| &mut c.energy_causality,
                    "energy_causality",
                    Some(m),
                    Some(u),
                    format!("needs {spend:e} J, has {avail:e} J"),
                );
            }
        }
        state.commit(slot, &harvest, instance.battery_cap_j);
    }
    for (u, &count) in seen.iter().enumerate() {
        if count != 1 {
            col.flag(
                |c| &mut c.each_user_once,
                "each_user_once",
                None,
                Some(u),
                format!("scheduled {count} times"),
            );
        }
    }
    ValidationReport {
        valid: col.checks.all(),
        mode,
        checks: col.checks,
        first_violation: col.first,
        violations: col.count,
    }
}

#[allow(clippy::too_many_arguments)]
fn check_rates(
    col: &mut Collector,
    m: usize,
    slot: &Slot,
    members: &[usize],
    powers: &[f64],
    instance: &NetworkInstance,
    radio: &RadioConfig,
    mode: Mode,
    gamma: f64,
) {
    let tau = slot.duration_s;
    for &u in members {
        let d = instance.demand_bits[u];
        match mode {
            Mode::Constant => {
                let s = snr(u, members, powers, instance, radio);
                if s < gamma * (1.0 - SNR_REL_TOL) {
                    col.flag(
                        |c| &mut c.snr_threshold,
                        "snr_threshold",
                        Some(m),
                        Some(u),
                        format!("SNR {s:e} below {gamma:e}"),
                    );
                }
                if radio.const_rate_bps * tau < d * (1.0 - CONST_BITS_REL_TOL) {
                    col.flag(
                        |c| &mut c.demand_met,
                        "demand_met",
                        Some(m),
                        Some(u),
                        format!("{} bits of {d}", radio.const_rate_bps * tau),
                    );
                }
            }
            Mode::Continuous => {
                let bits = rate_continuous(u, members, powers, instance, radio) * tau;
                if bits < d - BITS_ABS_TOL {
                    col.flag(
                        |c| &mut c.demand_met,
                        "demand_met",
                        Some(m),
                        Some(u),
                        format!("{bits} bits of {d}"),
                    );
                }
            }
        }
    }
}
