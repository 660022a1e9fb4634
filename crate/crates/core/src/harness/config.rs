use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::{EhConfig, GeometryConfig, Mode, RadioConfig};
use crate::sched::Algorithm;

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// HAP transmit power in dB relative to 1 W.
    HapPowerDb,
    NumCells,
    UsersPerCell,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::HapPowerDb => "hap_power_db",
            SweepAxis::NumCells => "num_cells",
            SweepAxis::UsersPerCell => "users_per_cell",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A full Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sweep: SweepSpec,
    pub realizations: usize,
    pub algorithms: Vec<Algorithm>,
    /// When set, restricts the run to algorithms of this rate model.
    #[serde(default)]
    pub mode: Option<Mode>,
    pub seed: u64,
    /// Redraw a realization until every user can meet the constant-rate
    /// threshold alone at `P_max`.
    pub resample_unservable: bool,
    pub radio: RadioConfig,
    pub eh: EhConfig,
    pub geometry: GeometryConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sweep: SweepSpec {
                axis: SweepAxis::HapPowerDb,
                values: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            },
            realizations: 100,
            algorithms: Algorithm::ALL.to_vec(),
            mode: None,
            seed: 1,
            resample_unservable: true,
            radio: RadioConfig::default(),
            eh: EhConfig::default(),
            geometry: GeometryConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.realizations == 0 {
            return bad("realizations must be at least 1");
        }
        if self.sweep.values.is_empty() {
            return bad("sweep.values must not be empty");
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) || !self.sweep.values.is_sorted_by(|a, b| a < b) {
            return bad("sweep.values must be finite and strictly increasing");
        }
        if matches!(self.sweep.axis, SweepAxis::NumCells | SweepAxis::UsersPerCell)
            && self.sweep.values.iter().any(|v| *v < 1.0 || v.fract() != 0.0)
        {
            return bad("count axes take positive integer values");
        }
        if self.algorithms.is_empty() {
            return bad("algorithms must not be empty");
        }
        if let Some(m) = self.mode {
            if let Some(a) = self.algorithms.iter().find(|a| a.mode() != m) {
                return Err(Error::Config(format!("algorithm {a} does not run in {m} mode")));
            }
        }
        self.radio.validate()?;
        self.eh.validate()?;
        Ok(())
    }

    /// Parses the flat `dotted.key = value` format on top of the defaults.
    ///
    /// Blank lines and `#` comments are skipped. A value containing commas
    /// becomes a list; `sweep.values` and `algorithms` are always lists.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tree = serde_json::to_value(Self::default()).expect("defaults serialize");
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim();
            let list_key = matches!(key, "sweep.values" | "algorithms");
            let parsed = if list_key || value.contains(',') {
                Value::Array(
                    value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(scalar)
                        .collect(),
                )
            } else {
                scalar(value)
            };
            set_path(&mut tree, key, parsed).map_err(|m| Error::Config(format!("line {}: {m}", lineno + 1)))?;
        }
        let cfg: Self = serde_json::from_value(tree).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = cfg.filtered_by_mode();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Drops algorithms that do not match `mode` when the list was left at
    /// its default.
    fn filtered_by_mode(mut self) -> Self {
        if let Some(m) = self.mode {
            if self.algorithms == Algorithm::ALL {
                self.algorithms.retain(|a| a.mode() == m);
            }
        }
        self
    }

    /// Canonical flat rendering; `parse(render())` round-trips.
    pub fn render(&self) -> String {
        let tree = serde_json::to_value(self).expect("config serializes");
        let mut out = String::new();
        flatten("", &tree, &mut out);
        out
    }
}

fn scalar(s: &str) -> Value {
    if let Ok(i) = s.parse::<u64>() {
        return Value::from(i);
    }
    if let Ok(f) = s.parse::<f64>() {
        if let Some(n) = serde_json::Number::from_f64(f) {
            return Value::Number(n);
        }
    }
    match s {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        "none" | "null" => Value::Null,
        _ => Value::String(s.to_string()),
    }
}

fn set_path(tree: &mut Value, key: &str, value: Value) -> std::result::Result<(), String> {
    let mut node = tree;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj: &mut Map<String, Value> = node
            .as_object_mut()
            .ok_or_else(|| format!("`{key}` is not a section"))?;
        if i + 1 == parts.len() {
            if !obj.contains_key(*part) {
                return Err(format!("unknown key `{key}`"));
            }
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj.get_mut(*part).ok_or_else(|| format!("unknown key `{key}`"))?;
    }
    unreachable!()
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(render_scalar).collect();
            out.push_str(&format!("{prefix} = {}\n", parts.join(", ")));
        }
        other => out.push_str(&format!("{prefix} = {}\n", render_scalar(other))),
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let cfg = ExperimentConfig::parse(
            "# fig 3\nsweep.axis = num_cells\nsweep.values = 1, 2, 3\nrealizations = 7\nalgorithms = psa,mpa\nradio.si_coeff = 1e-10\ngeometry.pathloss.alpha = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep.axis, SweepAxis::NumCells);
        assert_eq!(cfg.sweep.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(cfg.realizations, 7);
        assert_eq!(cfg.algorithms, vec![Algorithm::Psa, Algorithm::Mpa]);
        assert_eq!(cfg.radio.si_coeff, 1e-10);
        assert_eq!(cfg.geometry.pathloss.alpha, 3.0);
    }

    #[test]
    fn single_value_list() {
        let cfg = ExperimentConfig::parse("sweep.values = 10\nalgorithms = crsa").unwrap();
        assert_eq!(cfg.sweep.values, vec![10.0]);
        assert_eq!(cfg.algorithms, vec![Algorithm::Crsa]);
    }

    #[test]
    fn render_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.radio.si_coeff = 3.5e-9;
        cfg.mode = Some(Mode::Continuous);
        cfg.algorithms = vec![Algorithm::Psa];
        assert_eq!(ExperimentConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn mode_filters_default_algorithms() {
        let cfg = ExperimentConfig::parse("mode = constant").unwrap();
        assert_eq!(cfg.algorithms, vec![Algorithm::Crsa]);
        assert!(ExperimentConfig::parse("mode = constant\nalgorithms = psa").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("nonsense").is_err());
        assert!(ExperimentConfig::parse("radio.nope = 1").is_err());
        assert!(ExperimentConfig::parse("realizations = 0").is_err());
        assert!(ExperimentConfig::parse("sweep.values = 3, 1").is_err());
        assert!(ExperimentConfig::parse("sweep.axis = num_cells\nsweep.values = 1.5").is_err());
    }
}
