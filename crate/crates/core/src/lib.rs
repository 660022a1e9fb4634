//! Optimal power control and minimum-length scheduling for multi-cell
//! full-duplex wireless powered communication networks.
//!
//! Hybrid access points (HAPs) radiate energy continuously while users
//! harvest it and upload a fixed number of bits to their own HAP. Users from
//! different cells may share a time slot, at the price of mutual
//! interference. The crate provides
//!
//! - [`model`]: instances, channel generation, harvesting and link math,
//! - [`powerctl`]: Perron-Frobenius minimum power vectors and the bisection
//!   search for the shortest feasible concurrent slot,
//! - [`sched`]: the interference-budget constant-rate scheduler, the
//!   penalty-greedy continuous-rate scheduler, two baselines and a
//!   constraint validator,
//! - [`oracle`]: exhaustive partition/ordering search and a power-grid
//!   feasibility check used to certify the above on small inputs,
//! - [`harness`]: seeded Monte-Carlo sweeps with CSV output.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod par;
pub mod powerctl;
pub mod sched;

pub use error::{Error, Result};
pub use model::{
    EhConfig, GeometryConfig, Mode, NetworkInstance, PathLoss, RadioConfig, Scenario, Schedule, ScheduleState, Slot,
    Transmission,
};
