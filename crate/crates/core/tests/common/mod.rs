#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wpcn::model::{
    generate_network, EhConfig, GeometryConfig, Mode, NetworkInstance, RadioConfig, Scenario, Schedule, ScheduleState,
};
use wpcn::powerctl::continuous_feasible;
use wpcn::sched::validate_schedule;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Instance with hand-picked gain statistics: own uplink gains in
/// `own`, every cross gain in `cross`, downlink gains in `down`.
pub fn synthetic(
    rng: &mut ChaCha8Rng,
    hap_of: Vec<usize>,
    own: (f64, f64),
    cross: (f64, f64),
    down: (f64, f64),
    battery: (f64, f64),
) -> NetworkInstance {
    let k = hap_of.iter().max().map_or(1, |m| m + 1);
    let n = hap_of.len();
    let up = hap_of
        .iter()
        .map(|&h| {
            (0..k)
                .map(|j| {
                    if j == h {
                        log_uniform(rng, own.0, own.1)
                    } else {
                        log_uniform(rng, cross.0, cross.1)
                    }
                })
                .collect()
        })
        .collect();
    let dl = (0..n)
        .map(|_| (0..k).map(|_| log_uniform(rng, down.0, down.1)).collect())
        .collect();
    let batteries = (0..n).map(|_| log_uniform(rng, battery.0, battery.1)).collect();
    NetworkInstance::from_gains(hap_of, up, dl, vec![100.0; n], batteries, 1e-3).unwrap()
}

/// Drawn deployment whose users all meet the constant-rate threshold alone.
pub fn servable_network(seed: u64, cells: usize, per_cell: usize, radio: &RadioConfig) -> NetworkInstance {
    let geo = GeometryConfig {
        num_haps: cells,
        users_per_cell: per_cell,
        ..GeometryConfig::default()
    };
    let gamma = radio.constant_rate_gamma();
    let noise = wpcn::model::effective_noise(radio);
    for attempt in 0.. {
        let inst = generate_network(seed.wrapping_mul(7919).wrapping_add(attempt), &geo).unwrap();
        if (0..inst.num_users).all(|u| radio.pmax_w * inst.own_gain(u) >= gamma * noise) {
            return inst;
        }
    }
    unreachable!()
}

/// `(I - W D G) P = sigma` by dense LU with partial pivoting, built from the
/// raw gains. `None` if the solution is not strictly positive.
pub fn direct_min_power(members: &[usize], gammas: &[f64], scn: &Scenario<'_>) -> Option<Vec<f64>> {
    let inst = scn.instance;
    let radio = scn.radio;
    let n = members.len();
    let scale = if radio.bandwidth_scaled_interference {
        radio.bandwidth_hz
    } else {
        1.0
    };
    let si = if radio.pf_noise_includes_si {
        radio.si_coeff * radio.hap_power_w
    } else {
        0.0
    };
    let floor = radio.noise_density_w_per_hz * radio.bandwidth_hz + si;
    let a = DMatrix::from_fn(n, n, |i, j| {
        let own = inst.uplink_gain[members[i]][inst.hap_of[members[i]]];
        if i == j {
            1.0
        } else {
            -scale * gammas[i] * inst.uplink_gain[members[j]][inst.hap_of[members[i]]] / own
        }
    });
    let b = DVector::from_fn(n, |i, _| {
        gammas[i] * floor / inst.uplink_gain[members[i]][inst.hap_of[members[i]]]
    });
    let p = a.lu().solve(&b)?;
    p.iter().all(|v| *v > 0.0).then(|| p.iter().copied().collect())
}

/// Shortest feasible slot by scanning: geometric steps of 1% from `from`
/// until feasible, then a linear pass at resolution `eps * t / 10` over the
/// last step.
pub fn scan_slot_length(members: &[usize], state: &ScheduleState, scn: &Scenario<'_>, from: f64) -> f64 {
    let eps = scn.radio.bisect_rel_tol;
    let feasible = |t: f64| continuous_feasible(members, t, state, scn).is_some();
    let mut prev = from;
    let mut t = from;
    let mut steps = 0;
    while !feasible(t) {
        prev = t;
        t *= 1.01;
        steps += 1;
        assert!(steps < 200_000, "scan did not find a feasible length");
    }
    if t == from {
        return t;
    }
    let step = eps * prev / 10.0;
    let mut s = prev;
    while s < t {
        if feasible(s) {
            return s;
        }
        s += step;
    }
    t
}

pub fn assert_valid(schedule: &Schedule, inst: &NetworkInstance, radio: &RadioConfig, eh: &EhConfig, mode: Mode) {
    let report = validate_schedule(schedule, inst, radio, eh, mode);
    assert!(report.valid, "invalid schedule: {:?}", report.first_violation);
}

pub fn defaults() -> (RadioConfig, EhConfig) {
    (RadioConfig::default(), EhConfig::default())
}
