use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SweepAxis};
use crate::error::{Error, Result};
use crate::model::{generate_network, EhConfig, GeometryConfig, NetworkInstance, RadioConfig, Scenario};
use crate::par::{self, pairwise_sum, Execution};
use crate::sched::{validate_schedule, Algorithm};

pub const CSV_HEADER: &str = "axis,value,algorithm,mean_total_s,stderr_total_s,realizations";

/// Draws allowed per realization before giving up on servability.
pub const MAX_RESAMPLES: u64 = 1000;

/// One point of a sweep curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: f64,
    pub algorithm: Algorithm,
    /// NaN when the row was aborted.
    pub mean_total_s: f64,
    pub stderr_total_s: f64,
    /// Zero when the row was aborted.
    pub realizations: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Totals of every algorithm on one realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub value_index: usize,
    pub realization: usize,
    pub seed: u64,
    /// Aligned with the config's algorithm list.
    pub totals_s: Vec<std::result::Result<f64, String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub realizations: Vec<Realization>,
}

/// SplitMix64 finalizer applied over the master seed and each index in turn.
pub fn mix_seed(master: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Radio and geometry with the axis value applied.
fn configs_at(cfg: &ExperimentConfig, value: f64) -> (RadioConfig, GeometryConfig) {
    let mut radio = cfg.radio.clone();
    let mut geo = cfg.geometry.clone();
    match cfg.sweep.axis {
        SweepAxis::HapPowerDb => radio.hap_power_w = 10f64.powf(value / 10.0),
        SweepAxis::NumCells => geo.num_haps = value as usize,
        SweepAxis::UsersPerCell => geo.users_per_cell = value as usize,
    }
    (radio, geo)
}

fn servable(inst: &NetworkInstance, radio: &RadioConfig) -> bool {
    let gamma = radio.constant_rate_gamma();
    let noise = crate::model::effective_noise(radio);
    (0..inst.num_users).all(|n| radio.pmax_w * inst.own_gain(n) >= gamma * noise)
}

/// Instance of realization `(value_index, realization)` and the seed it was
/// drawn from. With resampling on, draw `a = 0, 1, ...` uses
/// `mix_seed(master, [value_index, realization, a])` until every user is
/// constant-rate servable.
pub fn instance_for(
    cfg: &ExperimentConfig,
    radio: &RadioConfig,
    geo: &GeometryConfig,
    value_index: usize,
    realization: usize,
) -> Result<(NetworkInstance, u64)> {
    for attempt in 0..MAX_RESAMPLES {
        let seed = mix_seed(cfg.seed, &[value_index as u64, realization as u64, attempt]);
        let inst = generate_network(seed, geo)?;
        if !cfg.resample_unservable || servable(&inst, radio) {
            return Ok((inst, seed));
        }
    }
    Err(Error::Config(format!(
        "no servable instance for value #{value_index}, realization {realization} in {MAX_RESAMPLES} draws"
    )))
}

fn run_realization(
    cfg: &ExperimentConfig,
    radio: &RadioConfig,
    geo: &GeometryConfig,
    eh: &EhConfig,
    value_index: usize,
    realization: usize,
) -> Realization {
    let drawn = instance_for(cfg, radio, geo, value_index, realization);
    let (inst, seed) = match drawn {
        Ok(x) => x,
        Err(e) => {
            return Realization {
                value_index,
                realization,
                seed: 0,
                totals_s: vec![Err(e.to_string()); cfg.algorithms.len()],
            }
        }
    };
    let totals_s = cfg
        .algorithms
        .iter()
        .map(|&algo| {
            let scn = Scenario::new(&inst, radio, eh).map_err(|e| e.to_string())?;
            let schedule = algo
                .run(&scn, mix_seed(seed, &[algo as u64]))
                .map_err(|e| format!("{algo}: {e}"))?;
            let report = validate_schedule(&schedule, &inst, radio, eh, algo.mode());
            if !report.valid {
                return Err(format!("{algo}: invalid schedule: {:?}", report.first_violation));
            }
            Ok(schedule.total_s)
        })
        .collect();
    Realization {
        value_index,
        realization,
        seed,
        totals_s,
    }
}

/// Runs the sweep on rayon's pool when available.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    run_sweep_with(cfg, Execution::default())
}

pub fn run_sweep_with(cfg: &ExperimentConfig, exec: Execution) -> Result<Vec<SweepRow>> {
    run_sweep_detailed(cfg, exec).map(|o| o.rows)
}

/// Sweep rows plus every per-realization total, for paired statistics.
///
/// Realizations of one axis value run in parallel; rows depend only on the
/// config, never on scheduling of the work.
pub fn run_sweep_detailed(cfg: &ExperimentConfig, exec: Execution) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut all = Vec::new();
    let indices: Vec<usize> = (0..cfg.realizations).collect();
    for (vi, &value) in cfg.sweep.values.iter().enumerate() {
        let (radio, geo) = configs_at(cfg, value);
        let reals = par::map(exec, &indices, |&r| run_realization(cfg, &radio, &geo, &cfg.eh, vi, r));
        for (ai, &algo) in cfg.algorithms.iter().enumerate() {
            let first_err = reals.iter().find_map(|r| r.totals_s[ai].as_ref().err());
            let row = match first_err {
                Some(e) => SweepRow {
                    axis: cfg.sweep.axis,
                    value,
                    algorithm: algo,
                    mean_total_s: f64::NAN,
                    stderr_total_s: f64::NAN,
                    realizations: 0,
                    error: Some(e.clone()),
                },
                None => {
                    let xs: Vec<f64> = reals
                        .iter()
                        .map(|r| *r.totals_s[ai].as_ref().expect("checked"))
                        .collect();
                    let (mean, stderr) = mean_stderr(&xs);
                    SweepRow {
                        axis: cfg.sweep.axis,
                        value,
                        algorithm: algo,
                        mean_total_s: mean,
                        stderr_total_s: stderr,
                        realizations: xs.len(),
                        error: None,
                    }
                }
            };
            rows.push(row);
        }
        all.extend(reals);
    }
    Ok(SweepOutcome {
        rows,
        realizations: all,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Writes rows in the fixed CSV schema.
pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.axis.name().to_string(),
            r.value.to_string(),
            r.algorithm.name().to_string(),
            r.mean_total_s.to_string(),
            r.stderr_total_s.to_string(),
            r.realizations.to_string(),
        ])?;
    }
    w.flush()
}
