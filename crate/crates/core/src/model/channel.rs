use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};

use super::{GeometryConfig, NetworkInstance, PathLoss};
use crate::error::{Error, Result};

/// Rejection-sampling budget for placing HAP centers.
const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// `PL(d) = PL(d0) + 10 alpha log10(d / d0) + shadow_db`, in dB.
pub fn path_loss_db(distance_m: f64, pl: &PathLoss, shadow_db: f64) -> f64 {
    pl.pl0_db + 10.0 * pl.alpha * (distance_m / pl.d0_m).log10() + shadow_db
}

/// Linear power gain for a path loss in dB and a small-scale power fade.
pub fn link_gain(path_loss_db: f64, fade: f64) -> f64 {
    10f64.powf(-path_loss_db / 10.0) * fade
}

/// Draws a random multi-cell deployment.
///
/// HAP centers are rejection-sampled inside the field so that cells do not
/// overlap, users are uniform in their cell disc, and every link gets
/// log-normal shadowing (shared by uplink and downlink of the same pair) plus
/// independent unit-mean exponential power fading per direction. Distances
/// below the reference distance are clamped to it. The output is a pure
/// function of `seed` and `geo`.
pub fn generate_network(seed: u64, geo: &GeometryConfig) -> Result<NetworkInstance> {
    if geo.num_haps == 0 || geo.users_per_cell == 0 {
        return Err(Error::Config("need at least one cell and one user per cell".into()));
    }
    if !(geo.cell_radius_m > 0.0 && geo.field_radius_m >= geo.cell_radius_m) {
        return Err(Error::Config("require field_radius >= cell_radius > 0".into()));
    }
    if !(geo.demand_bits > 0.0 && geo.battery_cap_j > 0.0 && geo.battery_init_j >= 0.0) {
        return Err(Error::Config("demand and battery capacity must be positive".into()));
    }
    if geo.battery_init_j > geo.battery_cap_j {
        return Err(Error::Config("initial battery exceeds capacity".into()));
    }
    if !(geo.pathloss.d0_m > 0.0 && geo.pathloss.shadow_sigma_db >= 0.0) {
        return Err(Error::Config("path-loss reference distance must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let haps = place_haps(&mut rng, geo)?;

    let k = geo.num_haps;
    let n = k * geo.users_per_cell;
    let mut hap_of = Vec::with_capacity(n);
    let mut users = Vec::with_capacity(n);
    for (cell, center) in haps.iter().enumerate() {
        for _ in 0..geo.users_per_cell {
            let [x, y] = uniform_in_disc(&mut rng, geo.cell_radius_m);
            users.push([center[0] + x, center[1] + y]);
            hap_of.push(cell);
        }
    }

    let shadow =
        Normal::new(0.0, geo.pathloss.shadow_sigma_db).map_err(|e| Error::Config(format!("shadowing: {e}")))?;
    let mut uplink = vec![vec![0.0; k]; n];
    let mut downlink = vec![vec![0.0; k]; n];
    for u in 0..n {
        for (h, hap) in haps.iter().enumerate() {
            let d = distance(users[u], *hap).max(geo.pathloss.d0_m);
            let z = if geo.pathloss.shadow_sigma_db > 0.0 {
                shadow.sample(&mut rng)
            } else {
                0.0
            };
            let pl = path_loss_db(d, &geo.pathloss, z);
            let (fu, fd) = if geo.fading {
                let a: f64 = Exp1.sample(&mut rng);
                let b: f64 = Exp1.sample(&mut rng);
                // a zero draw would violate the positive-gain invariant
                (a.max(f64::MIN_POSITIVE), b.max(f64::MIN_POSITIVE))
            } else {
                (1.0, 1.0)
            };
            uplink[u][h] = link_gain(pl, fu);
            downlink[u][h] = link_gain(pl, fd);
        }
    }

    let instance = NetworkInstance {
        num_haps: k,
        num_users: n,
        hap_of,
        uplink_gain: uplink,
        downlink_gain: downlink,
        demand_bits: vec![geo.demand_bits; n],
        battery_init_j: vec![geo.battery_init_j; n],
        battery_cap_j: geo.battery_cap_j,
        hap_positions_m: haps,
        user_positions_m: users,
    };
    instance.validate()?;
    Ok(instance)
}

fn place_haps(rng: &mut ChaCha8Rng, geo: &GeometryConfig) -> Result<Vec<[f64; 2]>> {
    let room = geo.field_radius_m - geo.cell_radius_m;
    let min_sep = 2.0 * geo.cell_radius_m;
    let mut centers: Vec<[f64; 2]> = Vec::with_capacity(geo.num_haps);
    let mut attempts = 0;
    while centers.len() < geo.num_haps {
        if attempts == MAX_PLACEMENT_ATTEMPTS {
            return Err(Error::Geometry {
                cells: geo.num_haps,
                cell_radius_m: geo.cell_radius_m,
                field_radius_m: geo.field_radius_m,
                attempts,
            });
        }
        attempts += 1;
        let c = uniform_in_disc(rng, room);
        if centers.iter().all(|o| distance(*o, c) >= min_sep) {
            centers.push(c);
        }
    }
    Ok(centers)
}

fn uniform_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    [r * theta.cos(), r * theta.sin()]
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_distance_gives_thirty_db() {
        let pl = PathLoss::default();
        let loss = path_loss_db(pl.d0_m, &pl, 0.0);
        assert_eq!(loss, 30.0);
        assert!((link_gain(loss, 1.0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn same_seed_same_instance() {
        let geo = GeometryConfig::default();
        let a = generate_network(42, &geo).unwrap();
        let b = generate_network(42, &geo).unwrap();
        assert_eq!(a, b);
        let c = generate_network(43, &geo).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_cell_single_user_stays_in_cell() {
        let geo = GeometryConfig {
            num_haps: 1,
            users_per_cell: 1,
            ..GeometryConfig::default()
        };
        for seed in 0..50 {
            let inst = generate_network(seed, &geo).unwrap();
            assert_eq!(inst.num_users, 1);
            let d = distance(inst.user_positions_m[0], inst.hap_positions_m[0]);
            assert!(d <= 10.0 + 1e-12);
        }
    }

    #[test]
    fn cells_do_not_overlap_and_fit_in_field() {
        let geo = GeometryConfig::default();
        let inst = generate_network(7, &geo).unwrap();
        let h = &inst.hap_positions_m;
        for i in 0..h.len() {
            assert!(distance(h[i], [0.0, 0.0]) <= 90.0 + 1e-9);
            for j in 0..i {
                assert!(distance(h[i], h[j]) >= 20.0);
            }
        }
        assert!(inst.uplink_gain.iter().flatten().all(|g| *g > 0.0 && g.is_finite()));
    }

    #[test]
    fn impossible_packing_is_reported() {
        let geo = GeometryConfig {
            num_haps: 200,
            ..GeometryConfig::default()
        };
        assert!(matches!(generate_network(1, &geo), Err(Error::Geometry { .. })));
    }
}
