use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use wpcn::harness::{self, ExperimentConfig};
use wpcn::model::{generate_network, Mode, NetworkInstance, Scenario, Schedule};
use wpcn::oracle::exact_min_schedule;
use wpcn::par::Execution;
use wpcn::sched::{validate_schedule, Algorithm, ValidationReport};

#[derive(Parser)]
#[command(
    name = "wpcn",
    version,
    about = "Scheduling for multi-cell full-duplex wireless powered networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` experiment config; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only run algorithms of this rate model: constant | continuous.
    #[arg(long, global = true)]
    mode: Option<Mode>,
    /// Comma-separated subset of crsa,psa,mpa,mcns.
    #[arg(long, global = true, value_delimiter = ',')]
    algos: Option<Vec<Algorithm>>,
}

#[derive(Args, Clone)]
struct Shape {
    /// Number of cells.
    #[arg(short = 'K', long = "cells")]
    cells: Option<usize>,
    #[arg(long)]
    users_per_cell: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random deployment and print it as JSON.
    Gen {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
    },
    /// Schedule an instance and print schedules plus validator reports.
    Schedule {
        /// Instance JSON as written by `gen`.
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a Monte-Carlo sweep and print CSV.
    Sweep {
        /// Run realizations on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare heuristics with exhaustive search on a small instance.
    OracleCompare {
        /// Instance JSON; drawn from --seed and the shape flags when absent.
        instance: Option<PathBuf>,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
    },
}

enum Outcome {
    Ok,
    Invalid,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Invalid) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.cmd {
        Command::Gen { shape, common } => {
            let cfg = load_config(&common)?;
            let inst = draw(&cfg, &shape)?;
            emit(&common.out, &serde_json::to_string_pretty(&inst)?)?;
            Ok(Outcome::Ok)
        }
        Command::Schedule { instance, common } => {
            let cfg = load_config(&common)?;
            let inst = read_instance(&instance)?;
            let scn = Scenario::new(&inst, &cfg.radio, &cfg.eh)?;
            let mut results = Vec::new();
            let mut ok = true;
            for algo in algorithms(&cfg, &common)? {
                match algo.run(&scn, cfg.seed) {
                    Ok(schedule) => {
                        let report = validate_schedule(&schedule, &inst, &cfg.radio, &cfg.eh, algo.mode());
                        ok &= report.valid;
                        results.push(ScheduleOutput {
                            algorithm: algo,
                            schedule: Some(schedule),
                            report: Some(report),
                            error: None,
                        });
                    }
                    Err(e) => {
                        ok = false;
                        results.push(ScheduleOutput {
                            algorithm: algo,
                            schedule: None,
                            report: None,
                            error: Some(e.to_string()),
                        });
                    }
                }
            }
            emit(&common.out, &serde_json::to_string_pretty(&results)?)?;
            Ok(if ok { Outcome::Ok } else { Outcome::Invalid })
        }
        Command::Sweep { sequential, common } => {
            let mut cfg = load_config(&common)?;
            cfg.algorithms = algorithms(&cfg, &common)?;
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let rows = harness::run_sweep_with(&cfg, exec)?;
            let mut buf = Vec::new();
            harness::write_csv(&rows, &mut buf)?;
            emit(&common.out, std::str::from_utf8(&buf)?)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "row {}={} {} aborted: {}",
                    r.axis.name(),
                    r.value,
                    r.algorithm,
                    r.error.as_deref().unwrap_or("")
                );
            }
            Ok(if rows.iter().all(|r| r.error.is_none()) {
                Outcome::Ok
            } else {
                Outcome::Invalid
            })
        }
        Command::OracleCompare {
            instance,
            shape,
            common,
        } => {
            let cfg = load_config(&common)?;
            let inst = match instance {
                Some(p) => read_instance(&p)?,
                None => draw(&cfg, &shape)?,
            };
            let scn = Scenario::new(&inst, &cfg.radio, &cfg.eh)?;
            let mut entries = Vec::new();
            let mut ok = true;
            for algo in algorithms(&cfg, &common)? {
                let oracle = exact_min_schedule(&scn, algo.mode())?;
                let entry = match algo.run(&scn, cfg.seed) {
                    Ok(s) => {
                        let report = validate_schedule(&s, &inst, &cfg.radio, &cfg.eh, algo.mode());
                        let dominated = oracle.best_total_s <= s.total_s * (1.0 + 1e-9);
                        ok &= report.valid && dominated;
                        CompareEntry {
                            algorithm: algo,
                            mode: algo.mode(),
                            oracle_total: oracle.best_total_s,
                            heuristic_total: Some(s.total_s),
                            valid: report.valid,
                            oracle_dominates: dominated,
                            orderings_evaluated: oracle.evaluated_count,
                            error: None,
                        }
                    }
                    Err(e) => CompareEntry {
                        algorithm: algo,
                        mode: algo.mode(),
                        oracle_total: oracle.best_total_s,
                        heuristic_total: None,
                        valid: false,
                        oracle_dominates: true,
                        orderings_evaluated: oracle.evaluated_count,
                        error: Some(e.to_string()),
                    },
                };
                entries.push(entry);
            }
            let out = CompareOutput {
                num_users: inst.num_users,
                num_cells: inst.num_haps,
                entries,
            };
            emit(&common.out, &serde_json::to_string_pretty(&out)?)?;
            Ok(if ok { Outcome::Ok } else { Outcome::Invalid })
        }
    }
}

#[derive(Serialize)]
struct ScheduleOutput {
    algorithm: Algorithm,
    schedule: Option<Schedule>,
    report: Option<ValidationReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CompareEntry {
    algorithm: Algorithm,
    mode: Mode,
    oracle_total: f64,
    heuristic_total: Option<f64>,
    valid: bool,
    oracle_dominates: bool,
    orderings_evaluated: u64,
    error: Option<String>,
}

#[derive(Serialize)]
struct CompareOutput {
    num_users: usize,
    num_cells: usize,
    entries: Vec<CompareEntry>,
}

fn load_config(common: &Common) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.mode.is_some() {
        cfg.mode = common.mode;
    }
    Ok(cfg)
}

fn algorithms(cfg: &ExperimentConfig, common: &Common) -> anyhow::Result<Vec<Algorithm>> {
    let list = common.algos.clone().unwrap_or_else(|| cfg.algorithms.clone());
    let mode = cfg.mode;
    if let (Some(m), Some(bad)) = (mode, list.iter().find(|a| Some(a.mode()) != mode)) {
        bail!("algorithm {bad} does not run in {m} mode");
    }
    if list.is_empty() {
        bail!("no algorithms selected");
    }
    Ok(list)
}

fn draw(cfg: &ExperimentConfig, shape: &Shape) -> anyhow::Result<NetworkInstance> {
    let mut geo = cfg.geometry.clone();
    if let Some(k) = shape.cells {
        geo.num_haps = k;
    }
    if let Some(u) = shape.users_per_cell {
        geo.users_per_cell = u;
    }
    Ok(generate_network(cfg.seed, &geo)?)
}

fn read_instance(path: &Path) -> anyhow::Result<NetworkInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst: NetworkInstance = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    inst.validate()?;
    Ok(inst)
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text.as_bytes()).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}
