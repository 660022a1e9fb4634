//! Brute-force references for small instances.
//!
//! [`exact_min_schedule`] walks every ordered partition of the users into
//! cell-admissible blocks and replays each with full battery bookkeeping.
//! [`grid_feasibility_oracle`] decides single-slot feasibility by scanning a
//! uniform power grid, independent of the linear-algebra kernel.

mod grid;
mod partitions;

pub use grid::{grid_feasibility_oracle, grid_step};
pub use partitions::{
    admissible_blocks, admissible_partitions, bell_number, binomial, block_admissible, factorial, full_mask,
    members_of, ordered_count, partition_counts_by_blocks, stirling2, Mask,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mode, Scenario, Schedule, ScheduleState, Slot};
use crate::par::{self, Execution};
use crate::powerctl::{constant_rate_slot, fba, PfSystem, PMAX_REL_TOL};

/// Largest instance the exhaustive search accepts.
pub const ORACLE_MAX_USERS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub mode: Mode,
    pub best_total_s: f64,
    /// Blocks of the best ordering, sorted by lowest member.
    pub best_partition: Vec<Vec<usize>>,
    /// Blocks in transmission order.
    pub best_order: Vec<Vec<usize>>,
    pub best_schedule: Schedule,
    /// Orderings considered, feasible or not.
    pub evaluated_count: u64,
    pub feasible_count: u64,
}

/// Minimum total schedule length over every ordered admissible partition.
///
/// Continuous mode sizes each block with [`fba`] at the block's start state.
/// Constant mode uses the minimum-power constant-rate slot and, when a
/// member is short of energy, first idles for the least time that makes the
/// block affordable (block feasibility only improves with a later start, so
/// the least wait is optimal). Orderings with an infeasible block are
/// skipped but still counted.
pub fn exact_min_schedule(scn: &Scenario<'_>, mode: Mode) -> Result<OracleResult> {
    exact_min_schedule_with(scn, mode, Execution::default())
}

pub fn exact_min_schedule_with(scn: &Scenario<'_>, mode: Mode, exec: Execution) -> Result<OracleResult> {
    let n = scn.num_users();
    if n > ORACLE_MAX_USERS {
        return Err(Error::OracleCap {
            users: n,
            cap: ORACLE_MAX_USERS,
        });
    }
    let hap_of = &scn.instance.hap_of;
    let full = full_mask(n);
    let completions = partitions::ordered_count_table(hap_of);
    let start = ScheduleState::new(scn.instance);
    let firsts = admissible_blocks(full, hap_of);

    let branches = par::map(exec, &firsts, |&block| {
        let mut search = Search {
            scn,
            mode,
            completions: &completions,
            order: Vec::new(),
            slots: Vec::new(),
            best: None,
            evaluated: 0,
            feasible: 0,
        };
        search.try_block(full, block, &start);
        search
    });

    let mut evaluated = 0u64;
    let mut feasible = 0u64;
    let mut best: Option<Best> = None;
    for b in branches {
        evaluated += b.evaluated;
        feasible += b.feasible;
        if let Some(cand) = b.best {
            if best.as_ref().is_none_or(|cur| cand.total < cur.total) {
                best = Some(cand);
            }
        }
    }
    debug_assert_eq!(evaluated as u128, completions[full as usize]);
    let best = best.ok_or(Error::Stall { now_s: 0.0 })?;
    let order: Vec<Vec<usize>> = best.order.iter().map(|&b| members_of(b)).collect();
    let mut partition = order.clone();
    partition.sort();
    let mut schedule = Schedule::default();
    for s in best.slots {
        schedule.push(s);
    }
    Ok(OracleResult {
        mode,
        best_total_s: best.total,
        best_partition: partition,
        best_order: order,
        best_schedule: schedule,
        evaluated_count: evaluated,
        feasible_count: feasible,
    })
}

/// Replays a fixed block order with the oracle's block rule. `None` when
/// some block is infeasible.
pub fn replay_order(order: &[Vec<usize>], scn: &Scenario<'_>, mode: Mode) -> Option<Schedule> {
    let mut state = ScheduleState::new(scn.instance);
    let mut schedule = Schedule::default();
    for block in order {
        for slot in run_block(block, &mut state, scn, mode)? {
            schedule.push(slot);
        }
    }
    Some(schedule)
}

struct Best {
    total: f64,
    order: Vec<Mask>,
    slots: Vec<Slot>,
}

struct Search<'s, 'a> {
    scn: &'s Scenario<'a>,
    mode: Mode,
    completions: &'s [u128],
    order: Vec<Mask>,
    slots: Vec<Slot>,
    best: Option<Best>,
    evaluated: u64,
    feasible: u64,
}

impl Search<'_, '_> {
    fn try_block(&mut self, rest: Mask, block: Mask, state: &ScheduleState) {
        let remain = rest & !block;
        let mut next = state.clone();
        let Some(slots) = run_block(&members_of(block), &mut next, self.scn, self.mode) else {
            self.evaluated += self.completions[remain as usize] as u64;
            return;
        };
        let pushed = slots.len();
        self.order.push(block);
        self.slots.extend(slots);
        if remain == 0 {
            self.evaluated += 1;
            self.feasible += 1;
            let total: f64 = self.slots.iter().map(|s| s.duration_s).sum();
            if self.best.as_ref().is_none_or(|b| total < b.total) {
                self.best = Some(Best {
                    total,
                    order: self.order.clone(),
                    slots: self.slots.clone(),
                });
            }
        } else {
            for b in admissible_blocks(remain, &self.scn.instance.hap_of) {
                self.try_block(remain, b, &next);
            }
        }
        self.order.pop();
        self.slots.truncate(self.slots.len() - pushed);
    }
}

/// Schedules one block from `state`, advancing it. Returns the emitted
/// slots (an idle slot may precede the transmission in constant mode).
fn run_block(members: &[usize], state: &mut ScheduleState, scn: &Scenario<'_>, mode: Mode) -> Option<Vec<Slot>> {
    let cap = scn.instance.battery_cap_j;
    match mode {
        Mode::Continuous => {
            let plan = fba(members, state, scn).ok()?;
            let slot = Slot::new(Mode::Continuous, plan.duration_s, members, &plan.powers_w);
            state.commit(&slot, &scn.harvest_w, cap);
            Some(vec![slot])
        }
        Mode::Constant => {
            let mut out = Vec::with_capacity(2);
            let plan = match constant_rate_slot(members, state, scn) {
                Some(p) => p,
                None => {
                    let wait = min_wait(members, state, scn)?;
                    let mut waited = state.clone();
                    waited.idle(wait, &scn.harvest_w, cap);
                    let plan = match constant_rate_slot(members, &waited, scn) {
                        Some(p) => p,
                        None => {
                            // the exact wait can miss by rounding
                            let wait = wait * (1.0 + 1e-12) + f64::EPSILON * waited.now_s;
                            waited = state.clone();
                            waited.idle(wait, &scn.harvest_w, cap);
                            constant_rate_slot(members, &waited, scn)?
                        }
                    };
                    out.push(Slot::idle(Mode::Constant, waited.now_s - state.now_s));
                    *state = waited;
                    plan
                }
            };
            let slot = Slot::new(Mode::Constant, plan.duration_s, members, &plan.powers_w);
            state.commit(&slot, &scn.harvest_w, cap);
            out.push(slot);
            Some(out)
        }
    }
}

/// Least idle time after which every member can pay for its minimum-power
/// constant-rate slot; `None` if the group is power-infeasible or some
/// member can never save enough.
fn min_wait(members: &[usize], state: &ScheduleState, scn: &Scenario<'_>) -> Option<f64> {
    let radio = scn.radio;
    let gamma = radio.constant_rate_gamma();
    let p = PfSystem::new(members, &vec![gamma; members.len()], scn).min_power()?;
    if p.iter().any(|&v| v > radio.pmax_w * (1.0 + PMAX_REL_TOL)) {
        return None;
    }
    let tau = members
        .iter()
        .map(|&u| scn.instance.demand_bits[u] / radio.const_rate_bps)
        .fold(0.0, f64::max);
    let mut wait: f64 = 0.0;
    for (&u, &pu) in members.iter().zip(&p) {
        let c = scn.harvest_w[u];
        let need = pu.min(radio.pmax_w) * tau - c * tau;
        if need <= state.battery_j[u] {
            continue;
        }
        if c <= 0.0 || need > scn.instance.battery_cap_j {
            return None;
        }
        wait = wait.max((need - state.battery_j[u]) / c);
    }
    Some(wait)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EhConfig, NetworkInstance, RadioConfig};

    fn inst(hap_of: Vec<usize>, cross: f64, battery: f64) -> NetworkInstance {
        let k = hap_of.iter().max().unwrap() + 1;
        let up = hap_of
            .iter()
            .enumerate()
            .map(|(u, &h)| {
                (0..k)
                    .map(|j| if j == h { 1e-4 * (1.0 + u as f64 * 0.1) } else { cross })
                    .collect()
            })
            .collect();
        let n = hap_of.len();
        NetworkInstance::from_gains(
            hap_of,
            up,
            vec![vec![1e-4; k]; n],
            vec![100.0; n],
            vec![battery; n],
            1e-3,
        )
        .unwrap()
    }

    #[test]
    fn single_user_is_one_fba_slot() {
        let i = inst(vec![0], 1e-12, 1e-6);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        let res = exact_min_schedule(&scn, Mode::Continuous).unwrap();
        let direct = fba(&[0], &ScheduleState::new(&i), &scn).unwrap();
        assert_eq!(res.best_total_s, direct.duration_s);
        assert_eq!(res.evaluated_count, 1);
    }

    #[test]
    fn same_cell_pair_takes_best_order() {
        let i = inst(vec![0, 0], 1e-12, 1e-6);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        let res = exact_min_schedule(&scn, Mode::Continuous).unwrap();
        assert_eq!(res.evaluated_count, 2);
        let a = replay_order(&[vec![0], vec![1]], &scn, Mode::Continuous)
            .unwrap()
            .total_s;
        let b = replay_order(&[vec![1], vec![0]], &scn, Mode::Continuous)
            .unwrap()
            .total_s;
        assert_eq!(res.best_total_s, a.min(b));
    }

    #[test]
    fn two_cell_pair_takes_best_of_three() {
        let i = inst(vec![0, 1], 1e-9, 1e-6);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        let res = exact_min_schedule(&scn, Mode::Continuous).unwrap();
        assert_eq!(res.evaluated_count, 3);
        let totals = [vec![vec![0, 1]], vec![vec![0], vec![1]], vec![vec![1], vec![0]]]
            .map(|o| replay_order(&o, &scn, Mode::Continuous).unwrap().total_s);
        let best = totals.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(res.best_total_s, best);
    }

    #[test]
    fn cap_is_enforced() {
        let i = inst(vec![0; 8], 1e-12, 1e-6);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        assert!(matches!(
            exact_min_schedule(&scn, Mode::Continuous),
            Err(Error::OracleCap { users: 8, cap: 7 })
        ));
    }

    #[test]
    fn constant_mode_waits_for_energy() {
        let i = inst(vec![0, 1], 1e-12, 0.0);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        let res = exact_min_schedule(&scn, Mode::Constant).unwrap();
        assert!(res.best_total_s >= 2e-3);
        assert_eq!(res.best_schedule.total_s, res.best_total_s);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let i = inst(vec![0, 1, 2, 0, 1], 1e-8, 1e-6);
        let (r, e) = (RadioConfig::default(), EhConfig::default());
        let scn = Scenario::new(&i, &r, &e).unwrap();
        let a = exact_min_schedule_with(&scn, Mode::Continuous, Execution::Sequential).unwrap();
        let b = exact_min_schedule_with(&scn, Mode::Continuous, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluated_count as u128, ordered_count(&i.hap_of));
    }
}
