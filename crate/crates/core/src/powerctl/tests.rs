use super::*;
use crate::model::{EhConfig, NetworkInstance, RadioConfig};

const W: f64 = 1e6;

fn pair(own: f64, cross: f64, battery: f64) -> NetworkInstance {
    NetworkInstance::from_gains(
        vec![0, 1],
        vec![vec![own, cross], vec![cross * 2.0, own * 0.5]],
        vec![vec![1e-5, 1e-7], vec![1e-7, 1e-5]],
        vec![100.0, 100.0],
        vec![battery, battery],
        1.0,
    )
    .unwrap()
}

fn single(own: f64, down: f64, battery: f64) -> NetworkInstance {
    NetworkInstance::from_gains(
        vec![0],
        vec![vec![own]],
        vec![vec![down]],
        vec![100.0],
        vec![battery],
        1.0,
    )
    .unwrap()
}

#[test]
fn singleton_has_zero_radius_and_closed_form_power() {
    let inst = single(1e-4, 1e-5, 1e-6);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let res = pf_min_power(&[0], &[0.05], &scn);
    assert_eq!(res.spectral_radius, 0.0);
    let p = res.min_power_w.unwrap()[0];
    let expect = 0.05 * scn.noise_w() / 1e-4;
    assert!((p - expect).abs() <= 1e-14 * expect);
    assert!(res.pmax_ok);
}

#[test]
fn pair_radius_and_power_match_two_by_two_solve() {
    let inst = pair(1e-4, 1e-11, 1e-6);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let (g1, g2) = (0.2, 0.7);
    let res = pf_min_power(&[0, 1], &[g1, g2], &scn);
    // a12 = g[1][hap0] / g[0][hap0], a21 = g[0][hap1] / g[1][hap1]
    let a12 = 2e-11 / 1e-4;
    let a21 = 1e-11 / 0.5e-4;
    let rho = W * (g1 * g2 * a12 * a21).sqrt();
    assert!((res.spectral_radius - rho).abs() <= 1e-12 * rho);

    // Cramer's rule on (I - M) P = sigma
    let noise = scn.noise_w();
    let s1 = g1 * noise / 1e-4;
    let s2 = g2 * noise / 0.5e-4;
    let (m12, m21) = (W * g1 * a12, W * g2 * a21);
    let det = 1.0 - m12 * m21;
    let p1 = (s1 + m12 * s2) / det;
    let p2 = (s2 + m21 * s1) / det;
    let p = res.min_power_w.unwrap();
    assert!((p[0] - p1).abs() <= 1e-12 * p1);
    assert!((p[1] - p2).abs() <= 1e-12 * p2);
}

#[test]
fn strongly_coupled_pair_is_infeasible() {
    let inst = pair(1e-4, 1e-8, 1e-6);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let gamma = radio.constant_rate_gamma();
    let res = pf_min_power(&[0, 1], &[gamma, gamma], &scn);
    assert!(res.spectral_radius >= 1.0);
    assert!(res.min_power_w.is_none());
    assert!(!res.pmax_ok);
    assert!(constant_rate_slot(&[0, 1], &ScheduleState::new(&inst), &scn).is_none());
}

#[test]
fn min_power_meets_every_snr_with_equality() {
    let inst = pair(1e-4, 1e-11, 1e-6);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let gammas = [0.3, 0.05];
    let p = pf_min_power(&[0, 1], &gammas, &scn).min_power_w.unwrap();
    for (i, &u) in [0usize, 1].iter().enumerate() {
        let s = crate::model::snr(u, &[0, 1], &p, &inst, &radio);
        assert!((s - gammas[i]).abs() <= 1e-9 * gammas[i], "{s} vs {}", gammas[i]);
    }
}

#[test]
fn omitting_si_from_noise_vector_breaks_tightness() {
    let inst = pair(1e-4, 1e-11, 1e-6);
    let radio = RadioConfig {
        pf_noise_includes_si: false,
        ..RadioConfig::default()
    };
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let p = pf_min_power(&[0, 1], &[0.3, 0.3], &scn).min_power_w.unwrap();
    let s = crate::model::snr(0, &[0, 1], &p, &inst, &radio);
    assert!(s < 0.3 * 1e-3);
}

#[test]
fn constant_rate_single_user_slot_is_two_ms() {
    let inst = single(1e-4, 1e-5, 1e-6);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let plan = constant_rate_slot(&[0], &ScheduleState::new(&inst), &scn).unwrap();
    assert!((plan.duration_s - 100.0 / 50e3).abs() < 1e-15);
    assert!((plan.duration_s - 2e-3).abs() < 1e-15);
}

#[test]
fn constant_rate_empty_battery_is_infeasible() {
    let inst = single(1e-4, 1e-9, 0.0);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let gamma = radio.constant_rate_gamma();
    let p = gamma * scn.noise_w() / 1e-4;
    assert!(scn.harvest_w[0] < p);
    assert!(constant_rate_slot(&[0], &ScheduleState::new(&inst), &scn).is_none());
}

#[test]
fn required_snr_reference_points() {
    let radio = RadioConfig::default();
    let t = 1e-3;
    let d = radio.bandwidth_hz * t;
    assert!((required_snr(d, t, &radio) - 1.0).abs() < 1e-12);
    assert!((required_snr(2.0 * d, t, &radio) - 3.0).abs() < 1e-12);
    assert!(required_snr(100.0, 1e9, &radio) < 1e-9);
}

#[test]
fn energy_ok_cases() {
    let inst = pair(1e-4, 1e-11, 0.0);
    let mut st = ScheduleState::new(&inst);
    let c = [1e-6, 2e-6];
    // P <= C: always fine
    assert!(energy_ok(&[0, 1], &[1e-6, 1e-6], 10.0, &st, &c));
    // empty battery, P = 2C
    assert!(!energy_ok(&[0], &[2e-6], 1.0, &st, &c));
    // exact boundary B = (P - C) t
    st.battery_j[0] = (3e-6 - 1e-6) * 0.5;
    assert!(energy_ok(&[0], &[3e-6], 0.5, &st, &c));
    st.battery_j[0] *= 0.999;
    assert!(!energy_ok(&[0], &[3e-6], 0.5, &st, &c));
}

#[test]
fn fba_singleton_with_ample_energy_returns_lower_bound() {
    let inst = single(1e-5, 1e-5, 1e-3);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let plan = fba(&[0], &ScheduleState::new(&inst), &scn).unwrap();
    let snr = radio.pmax_w * 1e-5 / scn.noise_w();
    let t = 100.0 / (W * (1.0 + snr).log2());
    assert!((plan.duration_s - t).abs() <= 1e-12 * t);
    assert!((plan.duration_s - scn.t_min_s[0]).abs() <= 1e-12 * t);
    assert!(plan.powers_w[0] <= radio.pmax_w);
}

#[test]
fn fba_energy_limited_singleton_exceeds_lower_bound() {
    let inst = single(1e-5, 1e-5, 0.0);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    let st = ScheduleState::new(&inst);
    let plan = fba(&[0], &st, &scn).unwrap();
    let (lo, _) = fba_bracket(&[0], &scn);
    assert!(plan.duration_s > 1.5 * lo);
    // feasible at t*, infeasible just below
    assert!(continuous_feasible(&[0], plan.duration_s, &st, &scn).is_some());
    let below = plan.duration_s * (1.0 - 2.0 * radio.bisect_rel_tol);
    assert!(continuous_feasible(&[0], below, &st, &scn).is_none());
    // energy-limited: spends (almost) exactly what it harvests
    let spend = plan.powers_w[0] * plan.duration_s;
    let have = scn.harvest_w[0] * plan.duration_s;
    assert!(spend <= have * (1.0 + 1e-9));
    assert!(spend >= have * (1.0 - 3.0 * radio.bisect_rel_tol));
}

#[test]
fn fba_reports_unbounded_expansion_without_energy() {
    // no harvesting possible (gain tiny), no battery
    let inst = single(1e-5, 1e-30, 0.0);
    let radio = RadioConfig::default();
    let eh = EhConfig::default();
    let scn = Scenario::new(&inst, &radio, &eh).unwrap();
    assert!(scn.harvest_w[0] < 1e-30);
    let err = fba(&[0], &ScheduleState::new(&inst), &scn).unwrap_err();
    assert!(matches!(err, Error::UnboundedExpansion { .. }));
}

#[test]
fn single_user_energy_increases_with_power() {
    let k = 1e-5 / 1e-7;
    let energy = |p: f64| p * 100.0 / (W * (1.0 + k * p).log2());
    let mut prev = energy(1e-9);
    for i in 1..=2000 {
        let p = 1e-9 + i as f64 * 5e-8;
        let e = energy(p);
        assert!(e > prev, "E not increasing at P = {p}");
        prev = e;
    }
}
