//! Experiment configuration: a flat JSON document.
//!
//! ```json
//! {
//!   "map": { "family": "scalar-linear", "params": [0.25] },
//!   "domain": { "lower": [-2.0], "upper": [2.0] },
//!   "h": 1.0,
//!   "mode": "bounds-report",
//!   "n_samples": 100000,
//!   "seed": 7
//! }
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use latlab_core::lattice::{DomainSpec, Membership};
use latlab_core::maps::{builtin_map, MapSpec};
use serde::{Deserialize, Serialize};

use crate::error::RunError;

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_RESOLUTION: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RobustnessSingle,
    MeasureSweep,
    QGridScan,
    BoundsReport,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::RobustnessSingle => "robustness-single",
            Mode::MeasureSweep => "measure-sweep",
            Mode::QGridScan => "q-grid-scan",
            Mode::BoundsReport => "bounds-report",
        }
    }
}

impl FromStr for Mode {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "robustness-single" => Ok(Mode::RobustnessSingle),
            "measure-sweep" => Ok(Mode::MeasureSweep),
            "q-grid-scan" => Ok(Mode::QGridScan),
            "bounds-report" => Ok(Mode::BoundsReport),
            other => Err(RunError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(RunError::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// One of `simplex`, `ball`, `l-shape`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), format: Format::Json }
    }
}

fn default_dir() -> String {
    ".".into()
}

fn default_samples() -> u64 {
    DEFAULT_SAMPLES
}

fn default_resolution() -> u64 {
    DEFAULT_RESOLUTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: MapConfig,
    pub domain: DomainConfig,
    pub h: f64,
    pub mode: Mode,
    /// Offset for `robustness-single`; reduced into the offset cube.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    /// Spacings for `measure-sweep`; defaults to `[h]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_values: Option<Vec<f64>>,
    #[serde(default = "default_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub seed: u64,
    /// Grid points per axis for `q-grid-scan`.
    #[serde(default = "default_resolution")]
    pub resolution: u64,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("bad config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn dimension(&self) -> usize {
        self.domain.lower.len()
    }

    pub fn build_map(&self) -> Result<MapSpec, RunError> {
        Ok(builtin_map(&self.map.family, &self.map.params, self.dimension())?)
    }

    pub fn build_domain(&self) -> Result<DomainSpec, RunError> {
        let dom = DomainSpec::new_box(self.domain.lower.clone(), self.domain.upper.clone())
            .map_err(|e| RunError::Config(e.to_string()))?;
        Ok(match &self.domain.predicate {
            Some(name) => dom.with_membership(Membership::from_name(name)?),
            None => dom,
        })
    }

    /// Checks everything that can be checked without running the experiment.
    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::Config(msg));
        if !(self.h.is_finite() && self.h > 0.0) {
            return bad(format!("h must be positive, got {}", self.h));
        }
        self.build_map()?;
        self.build_domain()?;
        match self.mode {
            Mode::RobustnessSingle => match &self.q {
                None => return bad("robustness-single needs `q`".into()),
                Some(q) if q.len() != self.dimension() => {
                    return bad(format!("q has {} coordinates, domain has {}", q.len(), self.dimension()))
                }
                Some(q) if q.iter().any(|v| !v.is_finite()) => return bad("q must be finite".into()),
                _ => {}
            },
            Mode::MeasureSweep => {
                if let Some(hs) = &self.h_values {
                    if hs.is_empty() || hs.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
                        return bad("h_values must be a nonempty list of positive spacings".into());
                    }
                }
            }
            Mode::QGridScan => {
                if self.dimension() > 2 {
                    return bad(format!("q-grid-scan supports d <= 2, got d = {}", self.dimension()));
                }
                if self.resolution < 2 {
                    return bad(format!("resolution must be at least 2, got {}", self.resolution));
                }
            }
            Mode::BoundsReport => {}
        }
        if self.mode != Mode::RobustnessSingle && self.mode != Mode::QGridScan
            && self.n_samples < latlab_core::measure::MIN_SAMPLES
        {
            return bad(format!(
                "n_samples must be at least {}, got {}",
                latlab_core::measure::MIN_SAMPLES,
                self.n_samples
            ));
        }
        if self.output.format == Format::Csv && self.mode != Mode::QGridScan {
            return bad("csv output is only available for q-grid-scan".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "map": {"family": "scalar-linear", "params": [0.25]},
        "domain": {"lower": [-2.0], "upper": [2.0]},
        "h": 1.0,
        "mode": "bounds-report",
        "seed": 7
    }"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(c.mode, Mode::BoundsReport);
        assert_eq!(c.n_samples, DEFAULT_SAMPLES);
        assert_eq!(c.output, OutputConfig::default());
        c.validate().unwrap();
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::from_json(BASE).unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_bad_configs() {
        let with = |from: &str, to: &str| ExperimentConfig::from_json(&BASE.replace(from, to));
        assert!(with("scalar-linear", "foo").unwrap().validate().is_err());
        assert!(with("\"h\": 1.0", "\"h\": -1.0").unwrap().validate().is_err());
        assert!(with("bounds-report", "robustness-single").unwrap().validate().is_err());
        assert!(with("bounds-report", "nonsense").is_err());
        assert!(with("\"seed\": 7", "\"seed\": 7, \"extra\": 1").is_err());
        assert!(with("[2.0]}", "[2.0], \"predicate\": \"blob\"}").unwrap().validate().is_err());
    }
}
