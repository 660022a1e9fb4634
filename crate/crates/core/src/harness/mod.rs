//! Seeded Monte-Carlo sweeps over one deployment parameter.

mod config;
mod sweep;

pub use config::{ExperimentConfig, SweepAxis, SweepSpec};
pub use sweep::{
    instance_for, mix_seed, run_sweep, run_sweep_detailed, run_sweep_with, write_csv, Realization, SweepOutcome,
    SweepRow, CSV_HEADER, MAX_RESAMPLES,
};
