use serde::{Deserialize, Serialize};

use super::interference::{earliest_start, max_affordable_interference, pairwise_interference};
use crate::error::{Error, Result};
use crate::model::{Mode, Scenario, Schedule, ScheduleState, Slot};
use crate::powerctl::{constant_rate_slot, PMAX_REL_TOL};

/// Power a feasible user is assumed to afford when its interference budget
/// is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrsaPowerRule {
    /// `min(P_max, E / (D / r))`: capped by both the power limit and energy.
    #[default]
    Min,
    /// `max(P_max, E / (D / r))`. Debug only: overstates budgets, the
    /// feasibility recheck then evicts more users.
    Max,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CrsaOptions {
    pub power_rule: CrsaPowerRule,
}

/// Budget snapshot taken right after a user joined a slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrsaAdmission {
    pub slot: usize,
    pub members: Vec<usize>,
    /// Budget powers of `members`.
    pub powers_w: Vec<f64>,
    pub i_max: Vec<f64>,
    pub i_acc: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrsaTrace {
    pub admissions: Vec<CrsaAdmission>,
    /// Users removed by the final feasibility recheck, per slot.
    pub evicted: Vec<(usize, usize)>,
}

/// Constant-rate scheduler with default options.
pub fn crsa(scn: &Scenario<'_>) -> Result<Schedule> {
    crsa_traced(scn, CrsaOptions::default()).map(|(s, _)| s)
}

/// Constant-rate scheduler.
///
/// Each iteration jumps the decision time to the earliest moment some
/// pending user can transmit alone (emitting an idle slot for the gap),
/// seeds the slot with the ready user that tolerates the most interference,
/// then visits the other cells in index order and admits the first ready
/// user (by descending budget) whose incoming interference fits its own
/// budget and whose outgoing interference fits every member's remaining
/// margin. The group is re-verified with the exact minimum-power test and
/// trimmed from the most recent admission until feasible.
pub fn crsa_traced(scn: &Scenario<'_>, opts: CrsaOptions) -> Result<(Schedule, CrsaTrace)> {
    let inst = scn.instance;
    let radio = scn.radio;
    let gamma = radio.constant_rate_gamma();
    let noise = scn.noise_w();
    for n in 0..inst.num_users {
        if radio.pmax_w * inst.own_gain(n) < gamma * noise * (1.0 - PMAX_REL_TOL) {
            return Err(Error::Unservable { user: n });
        }
    }

    let cells = inst.cells();
    let mut state = ScheduleState::new(inst);
    let mut schedule = Schedule::default();
    let mut trace = CrsaTrace::default();

    while !state.pending.is_empty() {
        let ready_at: Vec<(usize, f64)> = state
            .pending
            .iter()
            .map(|&n| (n, earliest_start(n, &state, scn)))
            .collect();
        let first = ready_at.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        if !first.is_finite() {
            return Err(Error::Stall { now_s: state.now_s });
        }
        let t_dec = first.max(state.now_s);
        if t_dec > state.now_s {
            let gap = t_dec - state.now_s;
            state.idle(gap, &scn.harvest_w, inst.battery_cap_j);
            schedule.push(Slot::idle(Mode::Constant, gap));
        }

        let n_users = inst.num_users;
        let mut budget_power = vec![0.0; n_users];
        let mut i_max = vec![f64::NEG_INFINITY; n_users];
        let feasible: Vec<usize> = ready_at
            .iter()
            .filter(|(_, ts)| *ts <= t_dec)
            .map(|(n, _)| *n)
            .collect();
        for &n in &feasible {
            let airtime = inst.demand_bits[n] / radio.const_rate_bps;
            let energy = state.battery_j[n] + scn.harvest_w[n] * airtime;
            let affordable = energy / airtime;
            budget_power[n] = match opts.power_rule {
                CrsaPowerRule::Min => radio.pmax_w.min(affordable),
                CrsaPowerRule::Max => radio.pmax_w.max(affordable),
            };
            i_max[n] = max_affordable_interference(n, budget_power[n], scn);
        }

        let seed = *feasible
            .iter()
            .max_by(|&&a, &&b| i_max[a].total_cmp(&i_max[b]).then(b.cmp(&a)))
            .expect("at least one user is ready at the decision time");
        let slot_idx = schedule.slots.len();
        let mut members = vec![seed];
        let mut i_acc = vec![0.0; n_users];

        for (k, cell) in cells.iter().enumerate() {
            if k == inst.hap_of[seed] {
                continue;
            }
            let mut candidates: Vec<usize> = cell.iter().copied().filter(|n| feasible.contains(n)).collect();
            candidates.sort_by(|&a, &b| i_max[b].total_cmp(&i_max[a]).then(a.cmp(&b)));
            for v in candidates {
                let incoming: f64 = members
                    .iter()
                    .map(|&j| pairwise_interference(j, v, budget_power[j], inst))
                    .sum();
                if incoming > i_max[v] {
                    // the best budget of this cell is exceeded, so are the rest
                    break;
                }
                let fits = members
                    .iter()
                    .all(|&s| i_max[s] - i_acc[s] >= pairwise_interference(v, s, budget_power[v], inst));
                if fits {
                    i_acc[v] = incoming;
                    for &s in &members {
                        i_acc[s] += pairwise_interference(v, s, budget_power[v], inst);
                    }
                    members.push(v);
                    trace.admissions.push(CrsaAdmission {
                        slot: slot_idx,
                        members: members.clone(),
                        powers_w: members.iter().map(|&m| budget_power[m]).collect(),
                        i_max: members.iter().map(|&m| i_max[m]).collect(),
                        i_acc: members.iter().map(|&m| i_acc[m]).collect(),
                    });
                    break;
                }
            }
        }

        let plan = loop {
            if let Some(plan) = constant_rate_slot(&members, &state, scn) {
                break plan;
            }
            if members.len() == 1 {
                return Err(Error::Stall { now_s: state.now_s });
            }
            let out = members.pop().expect("non-empty");
            trace.evicted.push((slot_idx, out));
        };
        let slot = Slot::new(Mode::Constant, plan.duration_s, &members, &plan.powers_w);
        state.commit(&slot, &scn.harvest_w, inst.battery_cap_j);
        schedule.push(slot);
    }
    Ok((schedule, trace))
}
