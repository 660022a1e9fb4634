use thiserror::Error;

/// Failures raised while building instances or running schedulers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid network instance: {0}")]
    Instance(String),

    #[error("could not place {cells} non-overlapping cells of radius {cell_radius_m} m in a field of radius {field_radius_m} m after {attempts} attempts")]
    Geometry {
        cells: usize,
        cell_radius_m: f64,
        field_radius_m: f64,
        attempts: usize,
    },

    #[error("slot-length bracket for group {members:?} exceeded the expansion cap at t = {t_upper_s} s")]
    UnboundedExpansion { members: Vec<usize>, t_upper_s: f64 },

    #[error("scheduler stalled at t = {now_s} s: no pending user can ever transmit")]
    Stall { now_s: f64 },

    #[error("user {user} cannot meet the constant-rate SNR threshold even alone at maximum power")]
    Unservable { user: usize },

    #[error("exhaustive search is capped at {cap} users, instance has {users}")]
    OracleCap { users: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
