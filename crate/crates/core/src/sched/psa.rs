use serde::{Deserialize, Serialize};

use super::penalty::{individual_penalties, penalty_of};
use crate::error::Result;
use crate::model::{Mode, Scenario, Schedule, ScheduleState, Slot};
use crate::powerctl::fba;

/// One candidate test inside a slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsaStep {
    pub candidate: usize,
    pub penalty_before: f64,
    /// `None` when no finite slot exists for the enlarged group.
    pub penalty_after: Option<f64>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsaSlotTrace {
    pub decision_time_s: f64,
    pub members: Vec<usize>,
    pub penalty: f64,
    pub steps: Vec<PsaStep>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PsaTrace {
    pub slots: Vec<PsaSlotTrace>,
}

impl PsaTrace {
    pub fn penalty_sum(&self) -> f64 {
        self.slots.iter().map(|s| s.penalty).sum()
    }
}

/// Penalty-based continuous-rate scheduler.
pub fn psa(scn: &Scenario<'_>) -> Result<Schedule> {
    psa_traced(scn).map(|(s, _)| s)
}

/// Penalty-based continuous-rate scheduler, with a per-slot trace.
///
/// At each decision time pending users are ranked once by individual
/// penalty. The lowest one seeds the slot and its cell leaves the candidate
/// list. Each next candidate joins iff the enlarged group's penalty is both
/// lower than the current one and negative; acceptance removes its cell,
/// rejection removes only the candidate. A candidate group for which the
/// slot-length search cannot find a finite bracket counts as a rejection.
pub fn psa_traced(scn: &Scenario<'_>) -> Result<(Schedule, PsaTrace)> {
    let inst = scn.instance;
    let mut state = ScheduleState::new(inst);
    let mut schedule = Schedule::default();
    let mut trace = PsaTrace::default();

    while !state.pending.is_empty() {
        let ranked = individual_penalties(&state, scn)?;
        let (seed, seed_penalty, seed_plan) = ranked[0].clone();
        let mut members = vec![seed];
        let mut plan = seed_plan;
        let mut current = seed_penalty;
        let mut steps = Vec::new();
        let mut candidates: Vec<usize> = ranked
            .iter()
            .map(|r| r.0)
            .filter(|&u| inst.hap_of[u] != inst.hap_of[seed])
            .collect();

        while let Some(&cand) = candidates.first() {
            let mut group = members.clone();
            group.push(cand);
            let trial = fba(&group, &state, scn).ok();
            let after = trial.as_ref().map(|p| penalty_of(&group, p, scn));
            let accepted = matches!(after, Some(a) if a < current && a < 0.0);
            steps.push(PsaStep {
                candidate: cand,
                penalty_before: current,
                penalty_after: after,
                accepted,
            });
            if accepted {
                members = group;
                plan = trial.expect("accepted trial has a plan");
                current = after.expect("accepted trial has a penalty");
                let cell = inst.hap_of[cand];
                candidates.retain(|&u| inst.hap_of[u] != cell);
            } else {
                candidates.remove(0);
            }
        }

        trace.slots.push(PsaSlotTrace {
            decision_time_s: state.now_s,
            members: members.clone(),
            penalty: current,
            steps,
        });
        let slot = Slot::new(Mode::Continuous, plan.duration_s, &members, &plan.powers_w);
        state.commit(&slot, &scn.harvest_w, inst.battery_cap_j);
        schedule.push(slot);
    }
    Ok((schedule, trace))
}
