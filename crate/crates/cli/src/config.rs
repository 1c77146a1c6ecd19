//! JSON config files.
//!
//! ```json
//! {
//!   "calibration": "baseline",
//!   "model_params": { "theta_u": 3.0 },
//!   "sim_config": { "platform_fee": 0.2, "steps": 300 },
//!   "sweep": { "parameter": "platform_fee", "values": [0.0, 0.2, 0.4], "seeds": [1, 2, 3] },
//!   "grid": { "fees": [0.1, 0.2], "biases": [0.5], "subsidies": [0.0], "seeds": [1], "horizon_split": 150 }
//! }
//! ```
//!
//! Every section is optional. Values are layered: the named calibration
//! (default `baseline`), then the file, then command-line flags.

use std::path::{Path, PathBuf};

use platform_sim::abm::SimConfig;
use platform_sim::calibration;
use platform_sim::experiments::{GridSpec, SweepParameter, SweepSpec};
use platform_sim::model::ParamError;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: `{key}`: {message}", path.display())]
    Parse {
        path: PathBuf,
        key: String,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] ParamError),
}

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    calibration: Option<String>,
    model_params: Option<Value>,
    sim_config: Option<Value>,
    sweep: Option<RawSweep>,
    grid: Option<RawGrid>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    parameter: SweepParameter,
    values: Vec<f64>,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
}

fn default_fees() -> Vec<f64> {
    vec![0.1, 0.2, 0.3]
}

fn default_biases() -> Vec<f64> {
    vec![0.0, 0.5, 1.0]
}

fn default_subsidies() -> Vec<f64> {
    vec![0.0, 0.5]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(default = "default_fees")]
    fees: Vec<f64>,
    #[serde(default = "default_biases")]
    biases: Vec<f64>,
    #[serde(default = "default_subsidies")]
    subsidies: Vec<f64>,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    horizon_split: Option<u64>,
}

/// A fully validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub sim: SimConfig,
    pub sweep: Option<SweepSpec>,
    pub grid: Option<GridSpec>,
}

impl Config {
    /// Built-in defaults when no file is given.
    pub fn builtin() -> Self {
        Config {
            sim: calibration::baseline(),
            sweep: None,
            grid: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses and validates `text`; `path` only labels errors.
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let parse_err = |key: String, message: String| ConfigError::Parse {
            path: path.to_path_buf(),
            key,
            message,
        };
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawFile = serde_path_to_error::deserialize(de)
            .map_err(|e| parse_err(e.path().to_string(), e.inner().to_string()))?;

        let name = raw.calibration.as_deref().unwrap_or("baseline");
        let base = calibration::named(name).ok_or_else(|| {
            parse_err(
                "calibration".to_string(),
                format!(
                    "unknown calibration {name:?}, expected one of {:?}",
                    calibration::NAMES
                ),
            )
        })?;
        let mut merged = serde_json::to_value(&base).expect("SimConfig serializes");
        if let Some(section) = raw.sim_config {
            let Value::Object(fields) = section else {
                return Err(parse_err(
                    "sim_config".to_string(),
                    "expected an object".to_string(),
                ));
            };
            for (k, v) in fields {
                if k == "model_params" {
                    return Err(parse_err(
                        "sim_config.model_params".to_string(),
                        "use the top-level model_params section".to_string(),
                    ));
                }
                merged[k] = v;
            }
        }
        if let Some(section) = raw.model_params {
            let Value::Object(fields) = section else {
                return Err(parse_err(
                    "model_params".to_string(),
                    "expected an object".to_string(),
                ));
            };
            for (k, v) in fields {
                merged["model_params"][k] = v;
            }
        }
        let sim: SimConfig = serde_path_to_error::deserialize(merged).map_err(|e| {
            let key = e.path().to_string();
            let key = match key.strip_prefix("model_params") {
                Some(rest) => format!("model_params{rest}"),
                None if key == "." => "sim_config".to_string(),
                None => format!("sim_config.{key}"),
            };
            parse_err(key, e.inner().to_string())
        })?;
        sim.validate()?;

        let sweep = raw.sweep.map(|s| SweepSpec {
            parameter: s.parameter,
            values: s.values,
            seeds: s.seeds,
            base_config: sim.clone(),
        });
        let grid = raw.grid.map(|g| GridSpec {
            fees: g.fees,
            biases: g.biases,
            subsidies: g.subsidies,
            seeds: g.seeds,
            base_config: sim.clone(),
            horizon_split: g.horizon_split,
        });
        Ok(Config { sim, sweep, grid })
    }

    /// Replaces the simulation seed, and the seed lists of any sweep or
    /// grid, with `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        self.sim.seed = seed;
        if let Some(s) = &mut self.sweep {
            s.base_config.seed = seed;
            s.seeds = vec![seed];
        }
        if let Some(g) = &mut self.grid {
            g.base_config.seed = seed;
            g.seeds = vec![seed];
        }
    }
}
