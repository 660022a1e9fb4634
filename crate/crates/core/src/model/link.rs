use std::f64::consts::LN_2;

use super::{EhConfig, NetworkInstance, RadioConfig};

/// Noise-plus-self-interference floor seen by every HAP: `N0 W + beta P_h`.
pub fn effective_noise(radio: &RadioConfig) -> f64 {
    radio.noise_density_w_per_hz * radio.bandwidth_hz + radio.si_coeff * radio.hap_power_w
}

/// Harvested power for a given total received RF power.
///
/// The normalized logistic `(Psi - Omega) / (1 - Omega)` simplifies to
/// `Psi * (1 - exp(-a P_T))`, which is exactly zero at `P_T = 0`, never
/// cancels catastrophically at small inputs and stays below one.
pub fn harvest_rate_from_power(received_w: f64, eh: &EhConfig) -> f64 {
    if received_w <= 0.0 {
        return 0.0;
    }
    let psi = logistic(eh.slope * (received_w - eh.turn_on_w));
    eh.saturation_power_w * psi * -(-eh.slope * received_w).exp_m1()
}

/// Harvesting rate `C_n` of user `n`; every HAP radiates `P_h` at all times.
pub fn harvest_rate(n: usize, instance: &NetworkInstance, eh: &EhConfig, radio: &RadioConfig) -> f64 {
    let received: f64 = instance.downlink_gain[n].iter().map(|h| h * radio.hap_power_w).sum();
    harvest_rate_from_power(received, eh)
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// SINR of member `n` when the users in `members` transmit with `powers`
/// (aligned with `members`). Interference is scaled by the bandwidth unless
/// the radio config turns that off.
pub fn snr(n: usize, members: &[usize], powers: &[f64], instance: &NetworkInstance, radio: &RadioConfig) -> f64 {
    debug_assert_eq!(members.len(), powers.len());
    let mut own = None;
    let mut interference = 0.0;
    for (&j, &p) in members.iter().zip(powers) {
        if j == n {
            own = Some(p);
        } else {
            interference += p * instance.cross_gain(j, n);
        }
    }
    let p_n = own.expect("snr: user is not a member of the group");
    p_n * instance.own_gain(n) / (effective_noise(radio) + radio.interference_scale() * interference)
}

/// Shannon rate `W log2(1 + SINR)` in bits per second.
pub fn rate_continuous(
    n: usize,
    members: &[usize],
    powers: &[f64],
    instance: &NetworkInstance,
    radio: &RadioConfig,
) -> f64 {
    radio.bandwidth_hz * snr(n, members, powers, instance, radio).ln_1p() / LN_2
}
