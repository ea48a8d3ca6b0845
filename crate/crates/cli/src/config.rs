//! Run configuration: a versioned TOML (or JSON) document describing the
//! constants, grid, initial state, potential, arrival point and time window.
//!
//! ```toml
//! schema_version = 1
//!
//! [constants]          # optional, defaults ħ = 1, m = 1
//! hbar = 1.0
//! mass = 0.5
//!
//! [grid]
//! x_min = -80.0
//! x_max = 120.0
//! n = 4096             # power of two, at least 16
//!
//! [state]
//! kind = "gaussian"    # or kind = "tabulated", path = "psi.csv" (columns re,im)
//! x0 = 5.0
//! p0 = 5.0
//! sigma_q = 1.0
//!
//! [potential]          # optional, defaults to free motion
//! kind = "square_barrier"   # free | square_barrier | harmonic | tabulated
//! height = 40.0
//! left = 12.0
//! right = 12.5
//!
//! [arrival]
//! x = 15.0
//! method = "split_operator" # or "free_exact" (free potential only)
//! dt = 5e-4                 # largest propagation step, split_operator only
//!
//! [times]
//! start = 0.0
//! step = 0.01
//! end = 6.0            # or count = 601
//! ```
//!
//! Relative paths are resolved against the directory holding the config.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toa_core::{
    gaussian, Grid, GaussianSpec, PhysicalConstants, Potential, TimeLattice, WaveFunction,
};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub constants: ConstantsSpec,
    pub grid: GridSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub potential: PotentialSpec,
    pub arrival: ArrivalSpec,
    pub times: TimesSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for ConstantsSpec {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian { x0: f64, p0: f64, sigma_q: f64 },
    /// CSV with columns `re,im`, one row per grid node.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Free,
    SquareBarrier { height: f64, left: f64, right: f64 },
    Harmonic {
        omega: f64,
        #[serde(default)]
        center: f64,
    },
    /// CSV with a single column `v`, one row per grid node.
    Tabulated { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    SplitOperator,
    FreeExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalSpec {
    pub x: f64,
    #[serde(default)]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesSpec {
    #[serde(default)]
    pub start: f64,
    pub step: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

/// A validated configuration turned into library objects.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub psi0: WaveFunction,
    pub potential: Potential,
    pub x: f64,
    pub times: TimeLattice,
    pub method: Method,
    pub dt: Option<f64>,
}

impl RunConfig {
    /// Reads a TOML config, or a JSON one when the extension is `.json`. A
    /// JSON run summary is accepted too: its `config` member is used.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config = if is_json { Self::from_json(&text)? } else { Self::from_toml(&text)? };
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    fn resolve_paths(&mut self, base: &Path) {
        let absolute = |p: &mut PathBuf| {
            if p.is_relative() {
                let joined = base.join(&*p);
                *p = joined.canonicalize().unwrap_or(joined);
            }
        };
        if let StateSpec::Tabulated { path } = &mut self.state {
            absolute(path);
        }
        if let PotentialSpec::Tabulated { path } = &mut self.potential {
            absolute(path);
        }
    }

    pub fn build(&self) -> CliResult<Experiment> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::field(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let constants = PhysicalConstants::new(self.constants.hbar, self.constants.mass)
            .map_err(|e| CliError::from_core("constants", e))?;
        let grid = Grid::new(self.grid.x_min, self.grid.x_max, self.grid.n)
            .map_err(|e| CliError::from_core("grid", e))?;
        let psi0 = self.build_state(&grid, constants)?;
        let potential = self.build_potential(grid.len())?;
        let x = self.arrival.x;
        if !grid.contains(x) {
            return Err(CliError::field(
                "arrival.x",
                format!("{x} outside grid domain [{}, {}]", grid.x_min(), grid.x_max()),
            ));
        }
        match self.arrival.method {
            Method::FreeExact if !potential.is_free() => {
                return Err(CliError::field("arrival.method", "free_exact requires potential kind \"free\""));
            }
            Method::SplitOperator if self.arrival.dt.is_none() => {
                return Err(CliError::field("arrival.dt", "required for split_operator"));
            }
            _ => {}
        }
        if let Some(dt) = self.arrival.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(CliError::field("arrival.dt", format!("must be positive, got {dt}")));
            }
        }
        let times = self.build_times()?;
        Ok(Experiment {
            psi0,
            potential,
            x,
            times,
            method: self.arrival.method,
            dt: self.arrival.dt,
        })
    }

    fn build_state(&self, grid: &Grid, constants: PhysicalConstants) -> CliResult<WaveFunction> {
        match &self.state {
            StateSpec::Gaussian { x0, p0, sigma_q } => {
                let spec = GaussianSpec::new(*x0, *p0, *sigma_q).map_err(|e| CliError::from_core("state", e))?;
                gaussian(&spec, grid, constants).map_err(|e| CliError::from_core("state", e))
            }
            StateSpec::Tabulated { path } => {
                let rows = read_columns(path, &["re", "im"]).map_err(|e| CliError::field("state.path", e))?;
                let amps = rows.iter().map(|r| Complex64::new(r[0], r[1])).collect();
                let psi = WaveFunction::new(grid.clone(), constants, amps, 0.0)
                    .map_err(|e| CliError::from_core("state", e))?;
                let norm2 = psi.norm2();
                if (norm2 - 1.0).abs() > toa_core::qgrid::NORM_TOLERANCE {
                    return Err(CliError::field("state", format!("amplitudes not normalized (norm² = {norm2})")));
                }
                Ok(psi)
            }
        }
    }

    fn build_potential(&self, n: usize) -> CliResult<Potential> {
        let built = match &self.potential {
            PotentialSpec::Free => Ok(Potential::Free),
            PotentialSpec::SquareBarrier { height, left, right } => Potential::square_barrier(*height, *left, *right),
            PotentialSpec::Harmonic { omega, center } => Potential::harmonic(*omega, *center),
            PotentialSpec::Tabulated { path } => {
                let rows = read_columns(path, &["v"]).map_err(|e| CliError::field("potential.path", e))?;
                if rows.len() != n {
                    return Err(CliError::field("potential", format!("{} values for a grid of {n}", rows.len())));
                }
                Potential::tabulated(rows.into_iter().map(|r| r[0]).collect())
            }
        };
        built.map_err(|e| CliError::from_core("potential", e))
    }

    fn build_times(&self) -> CliResult<TimeLattice> {
        let t = &self.times;
        let lattice = match (t.count, t.end) {
            (Some(count), None) => TimeLattice::new(t.start, t.step, count),
            (None, Some(end)) => TimeLattice::spanning(t.start, end, t.step),
            _ => return Err(CliError::field("times", "give exactly one of `count` and `end`")),
        };
        lattice.map_err(|e| CliError::from_core("times", e))
    }
}

/// Reads the named numeric columns from a headed CSV file.
fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let index: Vec<usize> = columns
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h.trim() == *c)
                .ok_or_else(|| format!("{}: missing column `{c}`", path.display()))
        })
        .collect::<Result<_, _>>()?;
    reader
        .records()
        .enumerate()
        .map(|(row, record)| {
            let record = record.map_err(|e| e.to_string())?;
            index
                .iter()
                .map(|&i| {
                    let field = record.get(i).unwrap_or("").trim();
                    field
                        .parse::<f64>()
                        .map_err(|_| format!("{}: row {}: `{field}` is not a number", path.display(), row + 1))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        schema_version = 1
        [grid]
        x_min = -40.0
        x_max = 40.0
        n = 1024
        [state]
        kind = "gaussian"
        x0 = 0.0
        p0 = 10.0
        sigma_q = 1.0
        [arrival]
        x = 10.0
        method = "free_exact"
        [times]
        step = 0.01
        end = 2.0
    "#;

    #[test]
    fn minimal_config_builds() {
        let config = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(config.constants, ConstantsSpec::default());
        assert_eq!(config.potential, PotentialSpec::Free);
        let exp = config.build().unwrap();
        assert_eq!(exp.times.len(), 201);
        assert_eq!(exp.method, Method::FreeExact);
    }

    #[test]
    fn json_echo_round_trips() {
        let config = RunConfig::from_toml(MINIMAL).unwrap();
        let echoed = serde_json::json!({ "config": config, "other": 1 }).to_string();
        assert_eq!(RunConfig::from_json(&echoed).unwrap(), config);
    }

    #[test]
    fn field_level_messages() {
        let bad_grid = MINIMAL.replace("n = 1024", "n = 1000");
        let err = RunConfig::from_toml(&bad_grid).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("grid:"), "{err}");
        assert_eq!(err.exit_code(), 1);

        let outside = MINIMAL.replace("x = 10.0", "x = 50.0");
        let err = RunConfig::from_toml(&outside).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("arrival.x:"), "{err}");

        let no_dt = MINIMAL.replace("method = \"free_exact\"", "method = \"split_operator\"");
        let err = RunConfig::from_toml(&no_dt).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("arrival.dt:"), "{err}");

        let unknown = MINIMAL.replace("sigma_q = 1.0", "sigma_q = 1.0\nwidth = 2.0");
        let err = RunConfig::from_toml(&unknown).unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");

        let version = MINIMAL.replace("schema_version = 1", "schema_version = 7");
        let err = RunConfig::from_toml(&version).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("schema_version:"), "{err}");

        let both = MINIMAL.replace("end = 2.0", "end = 2.0\ncount = 3");
        let err = RunConfig::from_toml(&both).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("times:"), "{err}");
    }

    #[test]
    fn free_exact_rejects_potentials() {
        let text = format!("{MINIMAL}\n[potential]\nkind = \"harmonic\"\nomega = 1.0\n");
        let err = RunConfig::from_toml(&text).unwrap().build().unwrap_err();
        assert!(err.to_string().starts_with("arrival.method:"), "{err}");
    }
}
