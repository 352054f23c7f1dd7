//! Serializable run reports. Field order is the JSON key order.

use latlab_core::measure::{BoundReport, Check, MeasureEstimate, RobustMeasure};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub hypotheses: Vec<HypothesisCheck>,
    pub payload: Payload,
}

impl RunReport {
    /// True when a bound check failed; `--strict` turns this into exit code 1.
    pub fn has_failed_checks(&self) -> bool {
        match &self.payload {
            Payload::BoundsReport(b) => b.checks.iter().any(|c| !c.passed),
            _ => false,
        }
    }
}

/// Outcome of one hypothesis check. `satisfied` is `None` when the check
/// does not apply (for example the margin check on a predicate domain).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub satisfied: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Payload {
    RobustnessSingle(RobustnessPayload),
    MeasureSweep(SweepPayload),
    QGridScan(ScanPayload),
    BoundsReport(BoundsPayload),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl From<&MeasureEstimate> for Estimate {
    fn from(e: &MeasureEstimate) -> Self {
        Self {
            value: e.value,
            stderr: e.stderr,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            n_samples: e.n_samples,
            seed: e.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleSummary {
    pub period: usize,
    pub basin: usize,
    pub members: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposition1Summary {
    pub one_step_from_above: bool,
    pub reaches_from_below: bool,
    pub above_failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessPayload {
    /// Offset actually used, reduced into the offset cube.
    pub q: Vec<f64>,
    pub robust: bool,
    pub reason: String,
    pub equilibrium: Option<Vec<f64>>,
    pub k: usize,
    pub fixed_points: Vec<Vec<f64>>,
    pub point_count: usize,
    pub escaped: usize,
    pub cycles: Vec<CycleSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposition1: Option<Proposition1Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub vs: Estimate,
    pub vs_gated: Estimate,
    pub gate_pass_fraction: f64,
    pub vnear: Estimate,
    pub k_integral: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPayload {
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPayload {
    pub resolution: u64,
    pub rows: usize,
    /// File name of the CSV table, relative to the output directory.
    pub table: String,
    pub fraction_k1: f64,
    pub fraction_robust: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub slack: f64,
}

impl From<&Check> for CheckResult {
    fn from(c: &Check) -> Self {
        Self { name: c.name.clone(), passed: c.passed, slack: c.slack }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsPayload {
    pub h: f64,
    #[serde(rename = "L")]
    pub capacity: u64,
    #[serde(rename = "L_per_axis")]
    pub capacity_per_axis: Vec<u64>,
    pub extent: Vec<f64>,
    pub vs: Estimate,
    pub vs_gated: Estimate,
    pub gate_pass_fraction: f64,
    pub vnear: Estimate,
    pub k_integral: Estimate,
    pub max_k: u64,
    pub k_violations: u64,
    pub lower_bound: f64,
    pub upper_bound: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub hypotheses_verified: bool,
    pub notes: Vec<String>,
}

impl From<&BoundReport> for BoundsPayload {
    fn from(r: &BoundReport) -> Self {
        let RobustMeasure { all, gated, gate_pass_fraction } = &r.vs;
        Self {
            h: r.h,
            capacity: r.extent.total,
            capacity_per_axis: r.extent.per_axis.clone(),
            extent: r.extent.extent.clone(),
            vs: all.into(),
            vs_gated: gated.into(),
            gate_pass_fraction: *gate_pass_fraction,
            vnear: (&r.vnear).into(),
            k_integral: (&r.k_integral.estimate).into(),
            max_k: r.k_integral.max_k,
            k_violations: r.k_integral.violations,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            checks: r.checks.iter().map(Into::into).collect(),
            hypotheses_verified: r.hypotheses_verified,
            notes: r.notes.clone(),
        }
    }
}

impl Estimate {
    fn numbers(&self) -> [f64; 4] {
        [self.value, self.stderr, self.ci_low, self.ci_high]
    }
}

impl Payload {
    /// Every real number carried by the payload.
    pub fn numbers(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match self {
            Payload::RobustnessSingle(p) => {
                out.extend(&p.q);
                out.extend(p.equilibrium.iter().flatten());
                out.extend(p.fixed_points.iter().flatten());
                out.extend(p.cycles.iter().flat_map(|c| c.members.iter().flatten()));
                if let Some(w) = p.proposition1.as_ref().and_then(|s| s.witness.as_ref()) {
                    out.extend(w);
                }
            }
            Payload::MeasureSweep(p) => {
                for r in &p.rows {
                    out.extend([r.h, r.gate_pass_fraction]);
                    for e in [&r.vs, &r.vs_gated, &r.vnear, &r.k_integral] {
                        out.extend(e.numbers());
                    }
                }
            }
            Payload::QGridScan(p) => out.extend([p.fraction_k1, p.fraction_robust]),
            Payload::BoundsReport(p) => {
                out.extend([p.h, p.gate_pass_fraction, p.lower_bound]);
                out.extend(&p.extent);
                out.extend(p.upper_bound);
                for e in [&p.vs, &p.vs_gated, &p.vnear, &p.k_integral] {
                    out.extend(e.numbers());
                }
                out.extend(p.checks.iter().map(|c| c.slack));
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.numbers().iter().all(|v| v.is_finite())
    }
}
