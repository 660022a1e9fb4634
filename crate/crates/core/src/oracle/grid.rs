use crate::model::{Mode, Scenario, ScheduleState};

/// Spacing of the uniform power grid with `grid_points` points on
/// `[0, P_max]`.
pub fn grid_step(pmax_w: f64, grid_points: usize) -> f64 {
    pmax_w / (grid_points - 1) as f64
}

/// True iff some point of the uniform grid on `[0, P_max]^|S|` meets every
/// member's SNR target, `P_max` and energy causality over a slot of length
/// `t_s` starting from `state`.
///
/// Targets are the constant-rate threshold, or in continuous mode the SNR
/// that carries the member's demand in `t_s`. Nothing here goes through the
/// minimum-power solver.
pub fn grid_feasibility_oracle(
    members: &[usize],
    t_s: f64,
    state: &ScheduleState,
    scn: &Scenario<'_>,
    grid_points: usize,
    mode: Mode,
) -> bool {
    assert!(grid_points >= 32, "grid needs at least 32 points per dimension");
    assert!((1..=3).contains(&members.len()), "grid oracle handles 1 to 3 users");
    let inst = scn.instance;
    let radio = scn.radio;
    let w = radio.bandwidth_hz;
    let noise = radio.noise_density_w_per_hz * w + radio.si_coeff * radio.hap_power_w;
    let scale = if radio.bandwidth_scaled_interference { w } else { 1.0 };
    let step = grid_step(radio.pmax_w, grid_points);

    let targets: Vec<f64> = members
        .iter()
        .map(|&u| match mode {
            Mode::Constant => 2f64.powf(radio.const_rate_bps / w) - 1.0,
            Mode::Continuous => 2f64.powf(inst.demand_bits[u] / (w * t_s)) - 1.0,
        })
        .collect();
    // energy caps each member's power to a prefix of the grid
    let top: Vec<usize> = members
        .iter()
        .map(|&u| {
            let budget = (state.battery_j[u] + scn.harvest_w[u] * t_s) / t_s;
            let k = (budget / step).floor();
            if k < 0.0 {
                0
            } else {
                (k as usize).min(grid_points - 1)
            }
        })
        .collect();
    let n = members.len();
    if top.contains(&0) {
        return false;
    }
    let mut gain = [[0.0; 3]; 3];
    let mut budget = [0.0; 3];
    for i in 0..n {
        for j in 0..n {
            gain[j][i] = inst.uplink_gain[members[j]][inst.hap_of[members[i]]];
        }
        let u = members[i];
        budget[i] = state.battery_j[u] + scn.harvest_w[u] * t_s;
    }

    let mut idx = [1usize; 3];
    let mut p = [0.0; 3];
    loop {
        for i in 0..n {
            p[i] = idx[i] as f64 * step;
        }
        let ok = (0..n).all(|i| {
            let interference: f64 = (0..n).filter(|&j| j != i).map(|j| p[j] * gain[j][i]).sum();
            p[i] * gain[i][i] >= targets[i] * (noise + scale * interference) && budget[i] >= p[i] * t_s
        });
        if ok {
            return true;
        }
        // odometer over 1..=top[i]
        let mut d = 0;
        loop {
            if d == n {
                return false;
            }
            if idx[d] < top[d] {
                idx[d] += 1;
                break;
            }
            idx[d] = 1;
            d += 1;
        }
    }
}
