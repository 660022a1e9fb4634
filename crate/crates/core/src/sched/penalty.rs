use crate::error::Result;
use crate::model::{Scenario, ScheduleState};
use crate::powerctl::{fba, SlotPlan};

/// Concurrent slot length of `members` at the current state minus the sum of
/// their individual interference-free, full-power transmission times.
/// Negative values mean sharing the slot beats any sequential plan.
pub fn penalty(members: &[usize], state: &ScheduleState, scn: &Scenario<'_>) -> Result<f64> {
    let plan = fba(members, state, scn)?;
    Ok(penalty_of(members, &plan, scn))
}

pub(crate) fn penalty_of(members: &[usize], plan: &SlotPlan, scn: &Scenario<'_>) -> f64 {
    plan.duration_s - members.iter().map(|&u| scn.t_min_s[u]).sum::<f64>()
}

/// Individual penalty and slot plan of every pending user, sorted by
/// ascending penalty (ties to the lower index).
pub fn individual_penalties(state: &ScheduleState, scn: &Scenario<'_>) -> Result<Vec<(usize, f64, SlotPlan)>> {
    let mut out = state
        .pending
        .iter()
        .map(|&u| {
            let plan = fba(&[u], state, scn)?;
            Ok((u, penalty_of(&[u], &plan, scn), plan))
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| super::by_value_then_index((a.1, a.0), (b.1, b.0)));
    Ok(out)
}
