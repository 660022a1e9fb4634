use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::penalty::individual_penalties;
use crate::error::{Error, Result};
use crate::model::{Mode, Scenario, Schedule, ScheduleState, Slot};
use crate::powerctl::fba;

/// Minimum-penalty single-user scheduling: every slot goes to the pending
/// user with the lowest individual penalty at the decision time.
pub fn mpa(scn: &Scenario<'_>) -> Result<Schedule> {
    let inst = scn.instance;
    let mut state = ScheduleState::new(inst);
    let mut schedule = Schedule::default();
    while !state.pending.is_empty() {
        let ranked = individual_penalties(&state, scn)?;
        let (user, _, plan) = &ranked[0];
        let slot = Slot::new(Mode::Continuous, plan.duration_s, &[*user], &plan.powers_w);
        state.commit(&slot, &scn.harvest_w, inst.battery_cap_j);
        schedule.push(slot);
    }
    Ok(schedule)
}

/// Random concurrent grouping: every slot takes one uniformly chosen pending
/// user from each cell that still has one, and runs at the optimal
/// continuous-rate length for that group. If no finite length exists for
/// the group, its member with the smallest individual time goes alone.
pub fn mcns(scn: &Scenario<'_>, seed: u64) -> Result<Schedule> {
    let inst = scn.instance;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ScheduleState::new(inst);
    let mut schedule = Schedule::default();
    let cells = inst.cells();
    while !state.pending.is_empty() {
        let mut group = Vec::with_capacity(cells.len());
        for cell in &cells {
            let left: Vec<usize> = cell.iter().copied().filter(|u| state.pending.contains(u)).collect();
            if !left.is_empty() {
                group.push(left[rng.random_range(0..left.len())]);
            }
        }
        let (members, plan) = match fba(&group, &state, scn) {
            Ok(plan) => (group, plan),
            Err(Error::UnboundedExpansion { .. }) => {
                let solo = *group
                    .iter()
                    .min_by(|&&a, &&b| super::by_value_then_index((scn.t_min_s[a], a), (scn.t_min_s[b], b)))
                    .expect("group is non-empty");
                (vec![solo], fba(&[solo], &state, scn)?)
            }
            Err(e) => return Err(e),
        };
        let slot = Slot::new(Mode::Continuous, plan.duration_s, &members, &plan.powers_w);
        state.commit(&slot, &scn.harvest_w, inst.battery_cap_j);
        schedule.push(slot);
    }
    Ok(schedule)
}
