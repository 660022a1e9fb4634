//! Optimal power control for a fixed group of concurrently transmitting
//! users.
//!
//! For SNR targets `gamma` the uplink constraints read `P >= M P + sigma`
//! with `M = W D G`, where `G` holds the relative cross gains
//! `g[j][hap(i)] / g[i][hap(i)]`, `D = diag(gamma)` and
//! `sigma_i = gamma_i (N0 W + beta P_h) / g[i][hap(i)]`. A solution exists iff
//! the spectral radius of `M` is below one, and then `(I - M)^-1 sigma` is the
//! component-wise minimum power vector. The constant-rate slot is a pure
//! feasibility question on that vector; the continuous-rate slot length is
//! found by bisection because infeasibility is monotone downwards in time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Square;
use crate::model::{RadioConfig, Scenario, ScheduleState};

/// Relative slack admitted on `P <= P_max` (rounding at the exact boundary).
pub const PMAX_REL_TOL: f64 = 1e-9;
/// Relative slack admitted on the energy-causality inequality.
pub const ENERGY_REL_TOL: f64 = 1e-9;
/// Relative residual bound for the minimum-power linear solve.
pub const SOLVE_REL_TOL: f64 = 1e-9;
/// The upper bracket of the slot-length search may grow to this multiple of
/// its initial value.
pub const EXPANSION_CAP: f64 = (1u64 << 20) as f64;

/// Linear system behind the minimum-power problem of one group.
#[derive(Debug, Clone)]
pub struct PfSystem {
    pub members: Vec<usize>,
    /// `a_ij = g[j][hap(i)] / g[i][hap(i)]`, zero diagonal.
    pub gain_matrix: Square,
    pub thresholds: Vec<f64>,
    pub noise_vec: Vec<f64>,
    /// Multiplier on the interference sum (`W`, or 1 when unscaled).
    pub interference_scale: f64,
}

impl PfSystem {
    pub fn new(members: &[usize], gammas: &[f64], scn: &Scenario<'_>) -> Self {
        let inst = scn.instance;
        let radio = scn.radio;
        let n = members.len();
        let mut gain = Square::zeros(n);
        for (i, &ui) in members.iter().enumerate() {
            let own = inst.own_gain(ui);
            for (j, &uj) in members.iter().enumerate() {
                if i != j {
                    gain.set(i, j, inst.cross_gain(uj, ui) / own);
                }
            }
        }
        let floor = pf_noise_floor(radio);
        let noise_vec = members
            .iter()
            .zip(gammas)
            .map(|(&u, &g)| g * floor / inst.own_gain(u))
            .collect();
        Self {
            members: members.to_vec(),
            gain_matrix: gain,
            thresholds: gammas.to_vec(),
            noise_vec,
            interference_scale: radio.interference_scale(),
        }
    }

    /// `W D G`.
    pub fn system_matrix(&self) -> Square {
        let n = self.members.len();
        let mut m = Square::zeros(n);
        for i in 0..n {
            let row = self.interference_scale * self.thresholds[i];
            for j in 0..n {
                m.set(i, j, row * self.gain_matrix.get(i, j));
            }
        }
        m
    }

    /// Minimum power vector via the M-matrix pivot test, without computing
    /// the spectrum.
    pub fn min_power(&self) -> Option<Vec<f64>> {
        let m = self.system_matrix();
        let p = m.solve_identity_minus(&self.noise_vec)?;
        if p.iter().all(|v| *v > 0.0 && v.is_finite()) && residual_ok(&m, &p, &self.noise_vec) {
            Some(p)
        } else {
            None
        }
    }
}

fn pf_noise_floor(radio: &RadioConfig) -> f64 {
    let thermal = radio.noise_density_w_per_hz * radio.bandwidth_hz;
    if radio.pf_noise_includes_si {
        thermal + radio.si_coeff * radio.hap_power_w
    } else {
        thermal
    }
}

fn residual_ok(m: &Square, p: &[f64], rhs: &[f64]) -> bool {
    let mp = m.mul_vec(p);
    p.iter().zip(mp).zip(rhs).all(|((pi, mpi), ri)| {
        let r = pi - mpi - ri;
        r.abs() <= SOLVE_REL_TOL * pi.abs().max(ri.abs())
    })
}

/// Perron-Frobenius verdict for one group and SNR targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfResult {
    pub spectral_radius: f64,
    /// Present iff the spectral radius is below one.
    pub min_power_w: Option<Vec<f64>>,
    pub pmax_ok: bool,
    /// Filled in by callers that know the slot length and batteries.
    pub energy_ok: Option<bool>,
}

impl PfResult {
    pub fn power_feasible(&self) -> bool {
        self.min_power_w.is_some() && self.pmax_ok
    }
}

/// Spectral radius and minimum power vector of `W D G` for `members` with
/// SNR targets `gammas`.
pub fn pf_min_power(members: &[usize], gammas: &[f64], scn: &Scenario<'_>) -> PfResult {
    assert!(!members.is_empty(), "pf_min_power: empty group");
    assert_eq!(members.len(), gammas.len());
    let sys = PfSystem::new(members, gammas, scn);
    let m = sys.system_matrix();
    let rho = m.spectral_radius();
    let min_power_w = if rho < 1.0 { sys.min_power() } else { None };
    let pmax_ok = min_power_w.as_ref().is_some_and(|p| within_pmax(p, scn.radio.pmax_w));
    PfResult {
        spectral_radius: rho,
        min_power_w,
        pmax_ok,
        energy_ok: None,
    }
}

fn within_pmax(p: &[f64], pmax: f64) -> bool {
    p.iter().all(|v| *v <= pmax * (1.0 + PMAX_REL_TOL))
}

fn clamp_pmax(p: &mut [f64], pmax: f64) {
    for v in p {
        *v = v.min(pmax);
    }
}

/// SNR needed to push `demand_bits` through in `t_s` seconds.
pub fn required_snr(demand_bits: f64, t_s: f64, radio: &RadioConfig) -> f64 {
    (demand_bits * std::f64::consts::LN_2 / (radio.bandwidth_hz * t_s)).exp_m1()
}

/// Energy causality over a slot of length `t_s` starting from `state`:
/// `B_n + C_n t - P_n t >= 0` for every member.
pub fn energy_ok(members: &[usize], powers: &[f64], t_s: f64, state: &ScheduleState, harvest_w: &[f64]) -> bool {
    members.iter().zip(powers).all(|(&u, &p)| {
        let spend = p * t_s;
        state.battery_j[u] + harvest_w[u] * t_s - spend >= -ENERGY_REL_TOL * spend
    })
}

/// Length and powers of a feasible slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotPlan {
    pub duration_s: f64,
    pub powers_w: Vec<f64>,
}

/// Constant-rate slot for `members` starting now: all members need
/// `gamma = 2^(r/W) - 1`, the slot lasts `max D_n / r`, and the group is
/// feasible iff the minimum power vector respects `P_max` and energy
/// causality.
pub fn constant_rate_slot(members: &[usize], state: &ScheduleState, scn: &Scenario<'_>) -> Option<SlotPlan> {
    let gamma = scn.radio.constant_rate_gamma();
    let sys = PfSystem::new(members, &vec![gamma; members.len()], scn);
    let mut p = sys.min_power()?;
    if !within_pmax(&p, scn.radio.pmax_w) {
        return None;
    }
    clamp_pmax(&mut p, scn.radio.pmax_w);
    let t = members
        .iter()
        .map(|&u| scn.instance.demand_bits[u] / scn.radio.const_rate_bps)
        .fold(0.0, f64::max);
    energy_ok(members, &p, t, state, &scn.harvest_w).then_some(SlotPlan {
        duration_s: t,
        powers_w: p,
    })
}

/// Feasibility of a continuous-rate slot of length `t_s`: returns the
/// minimum power vector when `P_max` and energy causality both hold.
pub fn continuous_feasible(members: &[usize], t_s: f64, state: &ScheduleState, scn: &Scenario<'_>) -> Option<Vec<f64>> {
    let gammas: Vec<f64> = members
        .iter()
        .map(|&u| required_snr(scn.instance.demand_bits[u], t_s, scn.radio))
        .collect();
    let mut p = PfSystem::new(members, &gammas, scn).min_power()?;
    if !within_pmax(&p, scn.radio.pmax_w) {
        return None;
    }
    clamp_pmax(&mut p, scn.radio.pmax_w);
    energy_ok(members, &p, t_s, state, &scn.harvest_w).then_some(p)
}

/// Initial `(lower, upper)` slot-length bracket: zero interference versus
/// every member interfering at `P_max`.
pub fn fba_bracket(members: &[usize], scn: &Scenario<'_>) -> (f64, f64) {
    let inst = scn.instance;
    let radio = scn.radio;
    let noise = scn.noise_w();
    let pmax = radio.pmax_w;
    let time = |u: usize, interference: f64| {
        let snr = pmax * inst.own_gain(u) / (noise + radio.interference_scale() * interference);
        inst.demand_bits[u] / (radio.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2)
    };
    let mut lower: f64 = 0.0;
    let mut upper: f64 = 0.0;
    for &n in members {
        let interference: f64 = members
            .iter()
            .filter(|&&j| j != n)
            .map(|&j| pmax * inst.cross_gain(j, n))
            .sum();
        lower = lower.max(time(n, 0.0));
        upper = upper.max(time(n, interference));
    }
    (lower, upper)
}

/// Shortest feasible continuous-rate slot for `members` starting from
/// `state`, found by bisection on the slot length.
///
/// The initial upper bound ignores energy; when it is not feasible it is
/// doubled (the previous value becoming the lower bound) until it is, up to
/// [`EXPANSION_CAP`] times its initial value. An infeasible midpoint raises
/// the lower bound. The returned length is the final upper bound, so it is
/// always feasible.
pub fn fba(members: &[usize], state: &ScheduleState, scn: &Scenario<'_>) -> Result<SlotPlan> {
    assert!(!members.is_empty(), "fba: empty group");
    let eps = scn.radio.bisect_rel_tol;
    let (mut lo, mut hi) = fba_bracket(members, scn);
    let cap = hi * EXPANSION_CAP;
    let mut best = loop {
        if let Some(p) = continuous_feasible(members, hi, state, scn) {
            break p;
        }
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::UnboundedExpansion {
                members: members.to_vec(),
                t_upper_s: hi,
            });
        }
    };
    while (hi - lo) / lo > eps {
        let mid = 0.5 * (lo + hi);
        match continuous_feasible(members, mid, state, scn) {
            Some(p) => {
                hi = mid;
                best = p;
            }
            None => lo = mid,
        }
    }
    Ok(SlotPlan {
        duration_s: hi,
        powers_w: best,
    })
}

#[cfg(test)]
mod tests;
