//! Mode pipelines: hypothesis checks, the mode computation, then the report.

use std::time::Instant;

use latlab_core::dynamics::{analyze_cycles, discretize, fixed_points, proposition1_check, robustness_from_cycles};
use latlab_core::lattice::{order_bounds, DomainSpec, GridContext, OrderBounds};
use latlab_core::maps::{check_margin, ConditionVerdict, MapSpec, Witness};
use latlab_core::measure::{
    bounds_report, estimate_k_integral, estimate_near_fixed_measure, estimate_vs, q_grid_scan, SampleExecutor,
    ScanRow, MARGIN_SAMPLES,
};

use crate::config::{ExperimentConfig, Mode};
use crate::error::RunError;
use crate::report::{
    BoundsPayload, CycleSummary, HypothesisCheck, Payload, Proposition1Summary, RobustnessPayload, RunReport,
    ScanPayload, SweepPayload, SweepRow, VERSION,
};

pub const SCAN_TABLE: &str = "scan.csv";

/// Result of [`run`]: the report, the scan table for `q-grid-scan`, and the
/// elapsed time, which is kept out of the report so reruns are identical.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub scan_rows: Option<Vec<ScanRow>>,
    pub wall_time_s: f64,
}

pub mod hypotheses {
    pub const MONOTONE: &str = "monotone";
    pub const SELF_MAPPING: &str = "self_mapping";
    pub const ORDER_BOUNDS: &str = "order_bounds";
    pub const MARGIN: &str = "margin";
    pub const NO_NONTRIVIAL_CYCLE: &str = "no_nontrivial_cycle";
    pub const OFFSET_GATE: &str = "offset_gate";
}

fn verdict_check(name: &str, v: &ConditionVerdict) -> HypothesisCheck {
    HypothesisCheck {
        name: name.into(),
        satisfied: Some(v.satisfied),
        detail: v.witness.as_ref().map(|w| format!("{w:?}")),
    }
}

fn margin_check(map: &MapSpec, dom: &DomainSpec, h: f64, seed: u64) -> HypothesisCheck {
    if !dom.is_box() {
        return HypothesisCheck {
            name: hypotheses::MARGIN.into(),
            satisfied: None,
            detail: Some("not checkable on predicate domains".into()),
        };
    }
    match check_margin(map, dom, h, MARGIN_SAMPLES, seed) {
        Ok(v) => verdict_check(hypotheses::MARGIN, &v),
        Err(e) => HypothesisCheck { name: hypotheses::MARGIN.into(), satisfied: Some(false), detail: Some(e.to_string()) },
    }
}

fn declared_monotone(map: &MapSpec) -> HypothesisCheck {
    HypothesisCheck {
        name: hypotheses::MONOTONE.into(),
        satisfied: Some(map.declared_monotone()),
        detail: Some(format!("declared by family `{}`", map.family())),
    }
}

fn gate_check(fraction: f64) -> HypothesisCheck {
    HypothesisCheck {
        name: hypotheses::OFFSET_GATE.into(),
        satisfied: Some(fraction == 1.0),
        detail: Some(format!("passed on {fraction} of sampled offsets")),
    }
}

/// Runs `config` to completion. The config is validated first.
pub fn run<E: SampleExecutor>(config: &ExperimentConfig, exec: &E) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    config.validate()?;
    let map = config.build_map()?;
    let dom = config.build_domain()?;
    let (h, seed, n) = (config.h, config.seed, config.n_samples);
    let mut scan_rows = None;

    let (hypotheses, payload) = match config.mode {
        Mode::RobustnessSingle => robustness_single(config, &map, &dom)?,
        Mode::MeasureSweep => {
            let mut rows = Vec::new();
            let mut gate_min = 1.0f64;
            for &h in config.h_values.as_deref().unwrap_or(&[config.h]) {
                let vs = estimate_vs(&map, &dom, h, n, seed, exec)?;
                let vnear = estimate_near_fixed_measure(&map, &dom, h, n, seed, exec)?;
                let k = estimate_k_integral(&map, &dom, h, n, seed, exec)?;
                gate_min = gate_min.min(vs.gate_pass_fraction);
                rows.push(SweepRow {
                    h,
                    vs: (&vs.all).into(),
                    vs_gated: (&vs.gated).into(),
                    gate_pass_fraction: vs.gate_pass_fraction,
                    vnear: (&vnear).into(),
                    k_integral: (&k.estimate).into(),
                });
            }
            let hyps = vec![declared_monotone(&map), margin_check(&map, &dom, h, seed), gate_check(gate_min)];
            (hyps, Payload::MeasureSweep(SweepPayload { rows }))
        }
        Mode::QGridScan => {
            let rows = q_grid_scan(&map, &dom, h, config.resolution, exec)?;
            let total = rows.len() as f64;
            let payload = ScanPayload {
                resolution: config.resolution,
                rows: rows.len(),
                table: SCAN_TABLE.into(),
                fraction_k1: rows.iter().filter(|r| r.k == 1).count() as f64 / total,
                fraction_robust: rows.iter().filter(|r| r.robust).count() as f64 / total,
            };
            scan_rows = Some(rows);
            let hyps = vec![declared_monotone(&map), margin_check(&map, &dom, h, seed)];
            (hyps, Payload::QGridScan(payload))
        }
        Mode::BoundsReport => {
            let b = bounds_report(&map, &dom, h, n, seed, exec)?;
            let margin = match &b.margin {
                Some(v) if v.witness.is_none() && !v.satisfied => HypothesisCheck {
                    name: hypotheses::MARGIN.into(),
                    satisfied: Some(false),
                    detail: b.notes.iter().find(|s| s.starts_with("margin")).cloned(),
                },
                Some(v) => verdict_check(hypotheses::MARGIN, v),
                None => margin_check(&map, &dom, h, seed),
            };
            let hyps = vec![declared_monotone(&map), margin, gate_check(b.vs.gate_pass_fraction)];
            (hyps, Payload::BoundsReport(BoundsPayload::from(&b)))
        }
    };

    if !payload.is_finite() {
        return Err(RunError::Internal("report contains a non-finite number".into()));
    }
    Ok(RunOutput {
        report: RunReport { version: VERSION.into(), config: config.clone(), hypotheses, payload },
        scan_rows,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn robustness_single(
    config: &ExperimentConfig,
    map: &MapSpec,
    dom: &DomainSpec,
) -> Result<(Vec<HypothesisCheck>, Payload), RunError> {
    let q = config.q.as_deref().unwrap_or_default();
    let ctx = GridContext::from_offset(config.h, q)?;
    let sys = discretize(map, dom, &ctx)?;
    if sys.is_empty() {
        return Err(RunError::Config("the domain contains no lattice points for this offset".into()));
    }
    let cycles = analyze_cycles(&sys);
    let verdict = robustness_from_cycles(&sys, &cycles);
    let fixed = fixed_points(&sys)?;
    let monotone = sys.monotone_on_points();

    let escape = sys.successors().iter().enumerate().find_map(|(i, s)| match s {
        latlab_core::Successor::Escaped(image) => Some(Witness::SelfMapping {
            x: sys.points()[i].clone(),
            image: image.clone(),
            image_point: ctx.point(image),
        }),
        _ => None,
    });
    let self_mapping = match escape {
        Some(w) => ConditionVerdict::violated(w),
        None => ConditionVerdict::holds(),
    };
    let bounds = match order_bounds(sys.points())? {
        OrderBounds::Bounded { .. } => HypothesisCheck { name: hypotheses::ORDER_BOUNDS.into(), satisfied: Some(true), detail: None },
        other => HypothesisCheck {
            name: hypotheses::ORDER_BOUNDS.into(),
            satisfied: Some(false),
            detail: Some(other.to_string()),
        },
    };
    let cycle_check = HypothesisCheck {
        name: hypotheses::NO_NONTRIVIAL_CYCLE.into(),
        satisfied: Some(!cycles.has_nontrivial_cycle()),
        detail: cycles
            .cycles
            .iter()
            .find(|c| c.period > 1)
            .map(|c| format!("cycle of period {} through {}", c.period, sys.points()[c.members[0]])),
    };
    let hyps = vec![
        verdict_check(hypotheses::MONOTONE, &monotone),
        verdict_check(hypotheses::SELF_MAPPING, &self_mapping),
        bounds,
        margin_check(map, dom, config.h, config.seed),
        cycle_check,
    ];

    let proposition1 = if verdict.robust && monotone.satisfied {
        let r = proposition1_check(&sys, &verdict)?;
        let witness = match r.verdict().witness {
            Some(Witness::Orbit { x, .. }) => Some(ctx.point(&x)),
            _ => None,
        };
        Some(Proposition1Summary {
            one_step_from_above: r.one_step_from_above.satisfied,
            reaches_from_below: r.reaches_from_below.satisfied,
            above_failures: r.above_failures,
            witness,
        })
    } else {
        None
    };

    let payload = RobustnessPayload {
        q: ctx.q().to_vec(),
        robust: verdict.robust,
        reason: verdict.reason.tag().into(),
        equilibrium: verdict.equilibrium.as_ref().map(|z| ctx.point(z)),
        k: fixed.len(),
        fixed_points: fixed.iter().map(|z| ctx.point(z)).collect(),
        point_count: sys.len(),
        escaped: cycles.escaped,
        cycles: cycles
            .cycles
            .iter()
            .map(|c| CycleSummary {
                period: c.period,
                basin: c.basin,
                members: c.members.iter().map(|&i| ctx.point(&sys.points()[i])).collect(),
            })
            .collect(),
        proposition1,
    };
    Ok((hyps, Payload::RobustnessSingle(payload)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use latlab_core::measure::Sequential;

    fn config(mode: &str, extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"map": {{"family": "scalar-linear", "params": [0.25]}},
                "domain": {{"lower": [-2.0], "upper": [2.0]}},
                "h": 1.0, "mode": "{mode}", "seed": 7 {extra}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn robustness_single_quarter_map() {
        let out = run(&config("robustness-single", r#", "q": [0.0]"#), &Sequential).unwrap();
        let Payload::RobustnessSingle(p) = &out.report.payload else { panic!() };
        assert!(p.robust);
        assert_eq!(p.equilibrium, Some(vec![0.0]));
        assert_eq!(p.reason, "unique-equilibrium-global-convergence");
        let prop1 = p.proposition1.as_ref().unwrap();
        assert!(!prop1.one_step_from_above && prop1.reaches_from_below);
        assert_eq!(prop1.witness, Some(vec![2.0]));
    }

    #[test]
    fn offset_is_reduced() {
        let out = run(&config("robustness-single", r#", "q": [0.6666666666666666]"#), &Sequential).unwrap();
        let Payload::RobustnessSingle(p) = &out.report.payload else { panic!() };
        assert!((p.q[0] + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bounds_report_quarter_map() {
        let out = run(&config("bounds-report", r#", "n_samples": 20000"#), &Sequential).unwrap();
        let Payload::BoundsReport(b) = &out.report.payload else { panic!() };
        assert_eq!(b.capacity, 5);
        assert!((b.lower_bound - 2.0 / 3.0).abs() < 0.05);
        assert!((b.upper_bound.unwrap() - 11.0 / 12.0).abs() < 0.05);
        assert!(b.checks.iter().all(|c| c.passed), "{:?}", b.checks);
        assert!(!out.report.has_failed_checks());
    }

    #[test]
    fn unknown_family_is_a_config_error() {
        let mut c = config("measure-sweep", "");
        c.map.family = "foo".into();
        assert_eq!(run(&c, &Sequential).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn scan_rows_are_returned() {
        let out = run(&config("q-grid-scan", r#", "resolution": 4"#), &Sequential).unwrap();
        assert_eq!(out.scan_rows.unwrap().len(), 4);
    }
}
