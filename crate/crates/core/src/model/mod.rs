//! Domain types and the physical-layer math shared by every other module.

mod channel;
mod link;
mod schedule;

pub use channel::{generate_network, link_gain, path_loss_db};
pub use link::{effective_noise, harvest_rate, harvest_rate_from_power, rate_continuous, snr};
pub use schedule::{Mode, Schedule, ScheduleState, Slot, Transmission};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical-layer parameters. All quantities are linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    pub bandwidth_hz: f64,
    pub noise_density_w_per_hz: f64,
    /// Residual full-duplex self-interference coefficient (linear).
    pub si_coeff: f64,
    pub hap_power_w: f64,
    pub pmax_w: f64,
    pub const_rate_bps: f64,
    /// Relative stopping tolerance of the slot-length bisection.
    pub bisect_rel_tol: f64,
    /// Include `si_coeff * hap_power_w` in the normalized noise vector of the
    /// minimum-power system. Turning this off reproduces the `W N0 / g` form
    /// (SNR is then no longer tight at the returned power vector).
    #[serde(default = "default_true")]
    pub pf_noise_includes_si: bool,
    /// Multiply the co-channel interference sum by `W` in the SINR
    /// denominator. Off gives the dimensionally plain `sum P_j g_j`.
    #[serde(default = "default_true")]
    pub bandwidth_scaled_interference: bool,
}

fn default_true() -> bool {
    true
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e6,
            // -174 dBm/Hz
            noise_density_w_per_hz: 10f64.powf(-20.4),
            // -70 dBm of self-interference at P_h = 1 W
            si_coeff: 1e-10,
            hap_power_w: 1.0,
            pmax_w: 1e-4,
            const_rate_bps: 50e3,
            bisect_rel_tol: 1e-4,
            pf_noise_includes_si: true,
            bandwidth_scaled_interference: true,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("hap_power_w", self.hap_power_w),
            ("pmax_w", self.pmax_w),
            ("const_rate_bps", self.const_rate_bps),
            ("bisect_rel_tol", self.bisect_rel_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.noise_density_w_per_hz.is_finite() && self.noise_density_w_per_hz >= 0.0) {
            return Err(Error::Config("noise_density_w_per_hz must be non-negative".into()));
        }
        if !(self.si_coeff.is_finite() && self.si_coeff >= 0.0) {
            return Err(Error::Config("si_coeff must be non-negative".into()));
        }
        if self.bisect_rel_tol >= 1.0 {
            return Err(Error::Config("bisect_rel_tol must be below 1".into()));
        }
        if self.noise_density_w_per_hz == 0.0 && self.si_coeff == 0.0 {
            return Err(Error::Config("total noise floor must be positive".into()));
        }
        Ok(())
    }

    /// Factor on `sum_j P_j g_j` in the SINR denominator.
    pub fn interference_scale(&self) -> f64 {
        if self.bandwidth_scaled_interference {
            self.bandwidth_hz
        } else {
            1.0
        }
    }

    /// SNR threshold that makes the constant rate equal to the Shannon rate.
    pub fn constant_rate_gamma(&self) -> f64 {
        (self.const_rate_bps / self.bandwidth_hz).exp2() - 1.0
    }
}

/// Logistic energy-harvesting curve parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhConfig {
    /// Harvested power at saturation.
    pub saturation_power_w: f64,
    /// Steepness of the logistic curve, per watt of received power.
    pub slope: f64,
    /// Turn-on threshold (logistic midpoint), watts of received power.
    pub turn_on_w: f64,
}

impl Default for EhConfig {
    fn default() -> Self {
        Self {
            saturation_power_w: 4.927e-3,
            slope: 150.0,
            turn_on_w: 0.014,
        }
    }
}

impl EhConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("saturation_power_w", self.saturation_power_w),
            ("slope", self.slope),
            ("turn_on_w", self.turn_on_w),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Log-distance path loss with log-normal shadowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    pub d0_m: f64,
    pub pl0_db: f64,
    pub alpha: f64,
    pub shadow_sigma_db: f64,
}

impl Default for PathLoss {
    fn default() -> Self {
        Self {
            d0_m: 1.0,
            pl0_db: 30.0,
            alpha: 2.7,
            shadow_sigma_db: 4.0,
        }
    }
}

/// Everything `generate_network` needs besides the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub num_haps: usize,
    pub users_per_cell: usize,
    pub field_radius_m: f64,
    pub cell_radius_m: f64,
    pub pathloss: PathLoss,
    pub fading: bool,
    pub demand_bits: f64,
    pub battery_init_j: f64,
    pub battery_cap_j: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            num_haps: 10,
            users_per_cell: 5,
            field_radius_m: 100.0,
            cell_radius_m: 10.0,
            pathloss: PathLoss::default(),
            fading: true,
            demand_bits: 100.0,
            battery_init_j: 1e-9,
            battery_cap_j: 1e-3,
        }
    }
}

/// Static network topology and per-user traffic/energy data.
///
/// Gains are linear power gains indexed `[user][hap]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkInstance {
    pub num_haps: usize,
    pub num_users: usize,
    pub hap_of: Vec<usize>,
    pub uplink_gain: Vec<Vec<f64>>,
    pub downlink_gain: Vec<Vec<f64>>,
    pub demand_bits: Vec<f64>,
    pub battery_init_j: Vec<f64>,
    pub battery_cap_j: f64,
    #[serde(default)]
    pub hap_positions_m: Vec<[f64; 2]>,
    #[serde(default)]
    pub user_positions_m: Vec<[f64; 2]>,
}

impl NetworkInstance {
    /// Builds and validates an instance from explicit gain tables
    /// (`[user][hap]`), without positions.
    pub fn from_gains(
        hap_of: Vec<usize>,
        uplink_gain: Vec<Vec<f64>>,
        downlink_gain: Vec<Vec<f64>>,
        demand_bits: Vec<f64>,
        battery_init_j: Vec<f64>,
        battery_cap_j: f64,
    ) -> Result<Self> {
        let inst = Self {
            num_haps: uplink_gain.first().map_or(0, Vec::len),
            num_users: hap_of.len(),
            hap_of,
            uplink_gain,
            downlink_gain,
            demand_bits,
            battery_init_j,
            battery_cap_j,
            hap_positions_m: Vec::new(),
            user_positions_m: Vec::new(),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Instance(msg));
        if self.num_haps == 0 || self.num_users == 0 {
            return bad("need at least one HAP and one user".into());
        }
        let n = self.num_users;
        if self.hap_of.len() != n
            || self.uplink_gain.len() != n
            || self.downlink_gain.len() != n
            || self.demand_bits.len() != n
            || self.battery_init_j.len() != n
        {
            return bad("per-user vectors must all have num_users entries".into());
        }
        if !(self.battery_cap_j.is_finite() && self.battery_cap_j > 0.0) {
            return bad("battery capacity must be positive".into());
        }
        for u in 0..n {
            if self.hap_of[u] >= self.num_haps {
                return bad(format!("user {u} maps to unknown HAP {}", self.hap_of[u]));
            }
            for (what, row) in [("uplink", &self.uplink_gain[u]), ("downlink", &self.downlink_gain[u])] {
                if row.len() != self.num_haps {
                    return bad(format!("{what} gain row of user {u} has wrong length"));
                }
                if row.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
                    return bad(format!("{what} gains of user {u} must be positive and finite"));
                }
            }
            if !(self.demand_bits[u].is_finite() && self.demand_bits[u] > 0.0) {
                return bad(format!("demand of user {u} must be positive"));
            }
            let b = self.battery_init_j[u];
            if !(b.is_finite() && b >= 0.0 && b <= self.battery_cap_j) {
                return bad(format!("initial battery of user {u} must lie in [0, B_max]"));
            }
        }
        Ok(())
    }

    /// Uplink gain from `user` to the HAP serving `receiver`.
    #[inline]
    pub fn cross_gain(&self, user: usize, receiver: usize) -> f64 {
        self.uplink_gain[user][self.hap_of[receiver]]
    }

    /// Uplink gain from `user` to its own HAP.
    #[inline]
    pub fn own_gain(&self, user: usize) -> f64 {
        self.uplink_gain[user][self.hap_of[user]]
    }

    /// Users attached to each HAP, in index order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.num_haps];
        for (u, &k) in self.hap_of.iter().enumerate() {
            cells[k].push(u);
        }
        cells
    }

    /// True when no two users of `members` share a HAP.
    pub fn one_per_cell(&self, members: &[usize]) -> bool {
        let mut seen = vec![false; self.num_haps];
        for &u in members {
            let k = self.hap_of[u];
            if seen[k] {
                return false;
            }
            seen[k] = true;
        }
        true
    }
}

/// An instance bundled with its configuration and per-user constants that
/// every scheduler needs repeatedly.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub instance: &'a NetworkInstance,
    pub radio: &'a RadioConfig,
    pub eh: &'a EhConfig,
    /// Harvesting rate of each user (W), constant over the frame.
    pub harvest_w: Vec<f64>,
    /// Individual transmission time at maximum power with no interference.
    pub t_min_s: Vec<f64>,
    noise_w: f64,
}

impl<'a> Scenario<'a> {
    pub fn new(instance: &'a NetworkInstance, radio: &'a RadioConfig, eh: &'a EhConfig) -> Result<Self> {
        radio.validate()?;
        eh.validate()?;
        instance.validate()?;
        let noise_w = effective_noise(radio);
        let harvest_w = (0..instance.num_users)
            .map(|n| harvest_rate(n, instance, eh, radio))
            .collect();
        let t_min_s = (0..instance.num_users)
            .map(|n| {
                let snr_max = radio.pmax_w * instance.own_gain(n) / noise_w;
                instance.demand_bits[n] / (radio.bandwidth_hz * snr_max.ln_1p() / std::f64::consts::LN_2)
            })
            .collect();
        Ok(Self {
            instance,
            radio,
            eh,
            harvest_w,
            t_min_s,
            noise_w,
        })
    }

    /// `N0 W + beta P_h`.
    #[inline]
    pub fn noise_w(&self) -> f64 {
        self.noise_w
    }

    pub fn num_users(&self) -> usize {
        self.instance.num_users
    }
}
