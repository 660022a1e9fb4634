use crate::model::{Scenario, ScheduleState};

/// Earliest absolute time at which user `n` can afford a constant-rate
/// transmission on its own, given its battery in `state` and continuous
/// harvesting from then on (including during its own transmission).
///
/// Returns `f64::INFINITY` when the user harvests nothing and its battery is
/// insufficient.
pub fn earliest_start(n: usize, state: &ScheduleState, scn: &Scenario<'_>) -> f64 {
    let radio = scn.radio;
    let inst = scn.instance;
    let gamma = radio.constant_rate_gamma();
    let p_min = radio.pmax_w.min(gamma * scn.noise_w() / inst.own_gain(n));
    let airtime = inst.demand_bits[n] / radio.const_rate_bps;
    let need = p_min * airtime;
    let battery = state.battery_j[n];
    let c = scn.harvest_w[n];
    if battery >= need {
        return state.now_s;
    }
    if c <= 0.0 {
        return f64::INFINITY;
    }
    let wait = need / c - battery / c - airtime;
    state.now_s + wait.max(0.0)
}

/// Largest interference sum (in units of `sum P_j g_j`) user `n` tolerates
/// at power `p_n` while still meeting the constant-rate SNR. Negative when
/// even zero interference is too much.
pub fn max_affordable_interference(n: usize, p_n: f64, scn: &Scenario<'_>) -> f64 {
    let gamma = scn.radio.constant_rate_gamma();
    (p_n * scn.instance.own_gain(n) / gamma - scn.noise_w()) / scn.radio.interference_scale()
}

/// Interference `P_j g[j][hap(v)]` that user `j` puts on user `v`'s HAP.
pub fn pairwise_interference(j: usize, v: usize, p_j: f64, instance: &crate::model::NetworkInstance) -> f64 {
    debug_assert_ne!(j, v);
    p_j * instance.cross_gain(j, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EhConfig, NetworkInstance, RadioConfig};

    fn inst(battery: f64) -> NetworkInstance {
        NetworkInstance::from_gains(
            vec![0, 1],
            vec![vec![1e-4, 3e-9], vec![3e-9, 1e-4]],
            vec![vec![1e-8, 1e-10], vec![1e-10, 1e-8]],
            vec![100.0; 2],
            vec![battery; 2],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn earliest_start_closed_forms() {
        let radio = RadioConfig::default();
        let eh = EhConfig::default();
        let i0 = inst(0.0);
        let scn = Scenario::new(&i0, &radio, &eh).unwrap();
        let gamma = radio.constant_rate_gamma();
        let p = gamma * scn.noise_w() / 1e-4;
        let c = scn.harvest_w[0];
        let st = ScheduleState::new(&i0);
        let ts = earliest_start(0, &st, &scn);
        let expect = p * 100.0 / (c * 50e3) - 100.0 / 50e3;
        assert!(expect > 0.0);
        assert!((ts - expect).abs() <= 1e-12 * expect);

        let full = inst(p * 2e-3);
        let scn = Scenario::new(&full, &radio, &eh).unwrap();
        assert_eq!(earliest_start(0, &ScheduleState::new(&full), &scn), 0.0);
    }

    #[test]
    fn max_interference_zero_at_exact_snr_and_affine() {
        let radio = RadioConfig::default();
        let eh = EhConfig::default();
        let i0 = inst(0.0);
        let scn = Scenario::new(&i0, &radio, &eh).unwrap();
        let gamma = radio.constant_rate_gamma();
        let p0 = gamma * scn.noise_w() / 1e-4;
        assert!(max_affordable_interference(0, p0, &scn).abs() < 1e-25);
        let slope = 1e-4 / (gamma * radio.bandwidth_hz);
        let a = max_affordable_interference(0, 2e-5, &scn);
        let b = max_affordable_interference(0, 3e-5, &scn);
        assert!(((b - a) / 1e-5 - slope).abs() <= 1e-9 * slope);
    }

    #[test]
    fn pairwise_interference_linear_and_symmetric() {
        let i0 = inst(0.0);
        assert_eq!(pairwise_interference(0, 1, 0.0, &i0), 0.0);
        let x = pairwise_interference(0, 1, 1e-5, &i0);
        assert_eq!(pairwise_interference(0, 1, 2e-5, &i0), 2.0 * x);
        let (p0, p1) = (1e-5, 4e-5);
        let i01 = pairwise_interference(0, 1, p0, &i0);
        let i10 = pairwise_interference(1, 0, p1, &i0);
        assert!((i01 * p1 - i10 * p0).abs() <= 1e-24);
    }
}
