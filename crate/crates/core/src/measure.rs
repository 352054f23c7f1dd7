//! Estimators for the measure of robust offsets, the near-fixed set and the
//! offset integral of `k(h,q)`, and the two-sided bound report built from
//! them.
//!
//! Samples are drawn from per-index substreams and reduced through integer
//! tallies, so results are bit-identical for any split of the index range
//! across workers.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::dynamics::{analyze_cycles, discretize, k_of, near_fixed, robustness_from_cycles};
use crate::error::{Error, Result};
use crate::lattice::{compute_extent, order_bounds, DomainSpec, ExtentReport, GridContext, OrderBounds};
use crate::maps::{check_margin, ConditionVerdict, MapSpec};
use crate::rng::{Purpose, Substream};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Smallest accepted sample count.
pub const MIN_SAMPLES: u64 = 100;

/// Samples used by the boundary-margin gate of [`bounds_report`].
pub const MARGIN_SAMPLES: u64 = 10_000;

/// Partial result over a range of sample indices. `merge` must be
/// associative; executors merge in index order.
pub trait Tally: Sized + Send {
    fn empty() -> Self;
    fn merge(self, other: Self) -> Self;
}

/// Strategy for covering `0..n` with calls to a sampling job.
pub trait SampleExecutor {
    fn run<T, F>(&self, n: u64, job: F) -> Result<T>
    where
        T: Tally,
        F: Fn(Range<u64>) -> Result<T> + Sync;
}

/// Runs the whole range on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SampleExecutor for Sequential {
    fn run<T, F>(&self, n: u64, job: F) -> Result<T>
    where
        T: Tally,
        F: Fn(Range<u64>) -> Result<T> + Sync,
    {
        job(0..n)
    }
}

/// Monte Carlo value of a measure with its uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MeasureEstimate {
    /// `volume * hits / n` with a 95% Wilson interval.
    pub fn bernoulli(hits: u64, n: u64, volume: f64, seed: u64) -> Self {
        let nf = n as f64;
        let p = hits as f64 / nf;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / nf;
        let centre = (p + z2 / (2.0 * nf)) / denom;
        let half = Z95 / denom * libm::sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf));
        Self {
            value: p * volume,
            stderr: libm::sqrt(p * (1.0 - p) / nf) * volume,
            ci_low: ((centre - half).max(0.0)).min(p) * volume,
            ci_high: ((centre + half).min(1.0)).max(p) * volume,
            n_samples: n,
            seed,
        }
    }

    /// `scale * mean` of an integer-valued sample with a normal interval.
    pub fn mean(sum: u64, sum_sq: u64, n: u64, scale: f64, seed: u64) -> Self {
        let nf = n as f64;
        let mean = sum as f64 / nf;
        let var = if n > 1 {
            ((sum_sq as f64 - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        let stderr = libm::sqrt(var / nf) * scale;
        let value = mean * scale;
        Self {
            value,
            stderr,
            ci_low: value - Z95 * stderr,
            ci_high: value + Z95 * stderr,
            n_samples: n,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Hits {
    n: u64,
    hits: u64,
}

impl Tally for Hits {
    fn empty() -> Self {
        Self::default()
    }
    fn merge(self, o: Self) -> Self {
        Self { n: self.n + o.n, hits: self.hits + o.hits }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct RobustTally {
    n: u64,
    robust: u64,
    gate_passed: u64,
    robust_gated: u64,
}

impl Tally for RobustTally {
    fn empty() -> Self {
        Self::default()
    }
    fn merge(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            robust: self.robust + o.robust,
            gate_passed: self.gate_passed + o.gate_passed,
            robust_gated: self.robust_gated + o.robust_gated,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct CountTally {
    n: u64,
    sum: u64,
    sum_sq: u64,
    max: u64,
    over_cap: u64,
}

impl Tally for CountTally {
    fn empty() -> Self {
        Self::default()
    }
    fn merge(self, o: Self) -> Self {
        Self {
            n: self.n + o.n,
            sum: self.sum + o.sum,
            sum_sq: self.sum_sq + o.sum_sq,
            max: self.max.max(o.max),
            over_cap: self.over_cap + o.over_cap,
        }
    }
}

impl<T: Send> Tally for Vec<T> {
    fn empty() -> Self {
        Vec::new()
    }
    fn merge(mut self, mut other: Self) -> Self {
        self.append(&mut other);
        self
    }
}

fn check_inputs(map: &MapSpec, dom: &DomainSpec, h: f64, n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::Argument(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Argument(format!("spacing {h} must be positive")));
    }
    if map.dimension() != dom.dimension() {
        return Err(Error::Argument("map and domain dimensions differ".into()));
    }
    Ok(())
}

/// Offset for sample `index`, uniform over `(-h/2, h/2]^d`.
pub fn sample_offset(h: f64, d: usize, seed: u64, index: u64) -> Result<GridContext> {
    let mut rng = Substream::new(seed, Purpose::Offset, index);
    let q: Vec<f64> = (0..d).map(|_| h / 2.0 - h * rng.unit()).collect();
    GridContext::from_offset(h, &q)
}

/// Robust-offset measure with the per-offset hypothesis gate applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustMeasure {
    /// Measure of robust offsets, unconditional.
    pub all: MeasureEstimate,
    /// Measure of offsets that are robust and pass the gate.
    pub gated: MeasureEstimate,
    /// Fraction of sampled offsets passing the gate.
    pub gate_pass_fraction: f64,
}

/// Per-offset hypotheses: no escapes, order bounds exist, and the map is
/// monotone on the lattice points or the system has no cycle of period > 1.
fn offset_gate(sys: &crate::dynamics::DiscretizedSystem, nontrivial_cycle: bool) -> bool {
    if sys.is_empty() || sys.has_escapes() {
        return false;
    }
    if !matches!(order_bounds(sys.points()), Ok(OrderBounds::Bounded { .. })) {
        return false;
    }
    !nontrivial_cycle || sys.monotone_on_points().satisfied
}

/// Estimates the measure of offsets `q` for which `(h, q, Ω)` is
/// dynamically robust.
pub fn estimate_vs<E: SampleExecutor>(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    n: u64,
    seed: u64,
    exec: &E,
) -> Result<RobustMeasure> {
    check_inputs(map, dom, h, n)?;
    let d = dom.dimension();
    let t: RobustTally = exec.run(n, |range| {
        let mut t = RobustTally::empty();
        for i in range {
            let ctx = sample_offset(h, d, seed, i)?;
            let sys = discretize(map, dom, &ctx)?;
            let cycles = analyze_cycles(&sys);
            let robust = robustness_from_cycles(&sys, &cycles).robust;
            let gate = offset_gate(&sys, cycles.has_nontrivial_cycle());
            t.n += 1;
            t.robust += robust as u64;
            t.gate_passed += gate as u64;
            t.robust_gated += (robust && gate) as u64;
        }
        Ok(t)
    })?;
    let vol = libm::pow(h, d as f64);
    Ok(RobustMeasure {
        all: MeasureEstimate::bernoulli(t.robust, t.n, vol, seed),
        gated: MeasureEstimate::bernoulli(t.robust_gated, t.n, vol, seed),
        gate_pass_fraction: t.gate_passed as f64 / t.n as f64,
    })
}

/// Estimates the measure of `{x ∈ Ω : x - h/2 <= f(x) < x + h/2}` by
/// uniform sampling over the bounding box.
pub fn estimate_near_fixed_measure<E: SampleExecutor>(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    n: u64,
    seed: u64,
    exec: &E,
) -> Result<MeasureEstimate> {
    check_inputs(map, dom, h, n)?;
    let d = dom.dimension();
    let (a, b) = (dom.lower(), dom.upper());
    let t: Hits = exec.run(n, |range| {
        let mut t = Hits::empty();
        let mut x = vec![0.0; d];
        let mut fx = vec![0.0; d];
        for i in range {
            let mut rng = Substream::new(seed, Purpose::DomainPoint, i);
            for j in 0..d {
                x[j] = a[j] + (b[j] - a[j]) * rng.unit();
            }
            t.n += 1;
            if dom.contains(&x) {
                map.eval_into(&x, &mut fx);
                t.hits += near_fixed(&x, &fx, h) as u64;
            }
        }
        Ok(t)
    })?;
    Ok(MeasureEstimate::bernoulli(t.hits, t.n, dom.box_volume(), seed))
}

/// Offset integral of `k(h,q)` with the pointwise `k <= L` audit.
#[derive(Debug, Clone, PartialEq)]
pub struct KIntegral {
    pub estimate: MeasureEstimate,
    pub max_k: u64,
    /// Sampled offsets with `k > L`.
    pub violations: u64,
}

/// Estimates `∫ k(h,q) dq` over the offset cube as `h^d` times the mean of
/// `k` at uniformly sampled offsets.
pub fn estimate_k_integral<E: SampleExecutor>(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    n: u64,
    seed: u64,
    exec: &E,
) -> Result<KIntegral> {
    check_inputs(map, dom, h, n)?;
    let d = dom.dimension();
    let cap = compute_extent(dom, h)?.total;
    let t: CountTally = exec.run(n, |range| {
        let mut t = CountTally::empty();
        for i in range {
            let ctx = sample_offset(h, d, seed, i)?;
            let k = k_of(map, dom, &ctx)? as u64;
            t.n += 1;
            t.sum += k;
            t.sum_sq += k * k;
            t.max = t.max.max(k);
            t.over_cap += (k > cap) as u64;
        }
        Ok(t)
    })?;
    Ok(KIntegral {
        estimate: MeasureEstimate::mean(t.sum, t.sum_sq, t.n, libm::pow(h, d as f64), seed),
        max_k: t.max,
        violations: t.over_cap,
    })
}

/// A named pass/fail result. `slack >= 0` exactly when the check passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub slack: f64,
}

impl Check {
    fn from_slack(name: &str, slack: f64) -> Self {
        Self { name: name.into(), passed: slack >= 0.0, slack }
    }
}

/// Check names used by [`bounds_report`].
pub mod checks {
    pub const LOWER_BOUND: &str = "lower_bound";
    pub const UPPER_BOUND: &str = "upper_bound";
    pub const RANGE_LOWER: &str = "vnear_at_least_cell";
    pub const RANGE_UPPER: &str = "vnear_at_most_capacity";
    pub const K_INTEGRAL_IDENTITY: &str = "k_integral_matches_vnear";
    pub const K_AT_MOST_CAPACITY: &str = "k_at_most_capacity";
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub h: f64,
    pub vs: RobustMeasure,
    pub vnear: MeasureEstimate,
    pub k_integral: KIntegral,
    pub extent: ExtentReport,
    /// `max{0, 2 h^d - vnear}`.
    pub lower_bound: f64,
    /// `L/(L-1) h^d - vnear/(L-1)`; undefined when `L = 1`.
    pub upper_bound: Option<f64>,
    pub checks: Vec<Check>,
    /// Sampled margin check; `None` for predicate domains.
    pub margin: Option<ConditionVerdict>,
    /// All gates passed: margin not falsified and every sampled offset
    /// passed the per-offset gate.
    pub hypotheses_verified: bool,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs the three estimators and evaluates the two-sided bound on the
/// robust-offset measure, the range of the near-fixed measure, the
/// integral identity, and the pointwise `k <= L` audit.
///
/// Bound checks allow three combined standard errors: the bounds are
/// computed from `vnear`, so their error enters alongside that of `vs`.
pub fn bounds_report<E: SampleExecutor>(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    n: u64,
    seed: u64,
    exec: &E,
) -> Result<BoundReport> {
    check_inputs(map, dom, h, n)?;
    let d = dom.dimension();
    let cell = libm::pow(h, d as f64);
    let extent = compute_extent(dom, h)?;
    let cap = extent.total as f64;
    let mut notes = Vec::new();

    let vs = estimate_vs(map, dom, h, n, seed, exec)?;
    let vnear = estimate_near_fixed_measure(map, dom, h, n, seed, exec)?;
    let k_integral = estimate_k_integral(map, dom, h, n, seed, exec)?;

    let margin = if dom.is_box() {
        match check_margin(map, dom, h, MARGIN_SAMPLES, seed) {
            Ok(v) => Some(v),
            Err(e) => {
                notes.push(format!("margin check not applicable: {e}"));
                Some(ConditionVerdict { satisfied: false, witness: None })
            }
        }
    } else {
        notes.push("predicate domain: boundary margin not checkable; capacity L taken from the bounding box".into());
        None
    };
    let gate_ok = vs.gate_pass_fraction == 1.0;
    if !gate_ok {
        notes.push(format!(
            "per-offset hypotheses failed on {:.4} of sampled offsets",
            1.0 - vs.gate_pass_fraction
        ));
    }
    let hypotheses_verified = gate_ok && margin.as_ref().is_none_or(|m| m.satisfied);
    if !hypotheses_verified {
        notes.push("hypotheses unverified: bounds reported but not claimed".into());
    }

    let lower_bound = (2.0 * cell - vnear.value).max(0.0);
    let lower_sigma = if 2.0 * cell - vnear.value > 0.0 { vnear.stderr } else { 0.0 };
    let upper_bound = if extent.total >= 2 {
        Some(cap / (cap - 1.0) * cell - vnear.value / (cap - 1.0))
    } else {
        notes.push("L = 1: upper bound formula divides by L - 1 and is omitted".into());
        None
    };

    let vs_se = vs.all.stderr;
    let mut checks = vec![Check::from_slack(
        checks::LOWER_BOUND,
        vs.all.value + 3.0 * libm::hypot(vs_se, lower_sigma) - lower_bound,
    )];
    if let Some(upper) = upper_bound {
        let sigma = libm::hypot(vs_se, vnear.stderr / (cap - 1.0));
        checks.push(Check::from_slack(checks::UPPER_BOUND, upper + 3.0 * sigma - vs.all.value));
    }
    checks.push(Check::from_slack(checks::RANGE_LOWER, vnear.value + 3.0 * vnear.stderr - cell));
    checks.push(Check::from_slack(checks::RANGE_UPPER, cap * cell + 3.0 * vnear.stderr - vnear.value));
    checks.push(Check::from_slack(
        checks::K_INTEGRAL_IDENTITY,
        3.0 * libm::hypot(k_integral.estimate.stderr, vnear.stderr)
            - (k_integral.estimate.value - vnear.value).abs(),
    ));
    checks.push(Check {
        name: checks::K_AT_MOST_CAPACITY.into(),
        passed: k_integral.violations == 0,
        slack: cap - k_integral.max_k as f64,
    });

    Ok(BoundReport {
        h,
        vs,
        vnear,
        k_integral,
        extent,
        lower_bound,
        upper_bound,
        checks,
        margin,
        hypotheses_verified,
        notes,
    })
}

/// One offset of a [`q_grid_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub q: Vec<f64>,
    pub k: usize,
    pub robust: bool,
    /// Real coordinates of the unique equilibrium, for robust rows.
    pub equilibrium: Option<Vec<f64>>,
}

/// Evaluates `k(h,q)` and robustness at the cell centres of a
/// `resolution^d` grid on the offset cube, first axis slowest.
pub fn q_grid_scan<E: SampleExecutor>(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    resolution: u64,
    exec: &E,
) -> Result<Vec<ScanRow>> {
    let d = dom.dimension();
    if d > 2 {
        return Err(Error::Config(format!("q-grid scan supports d <= 2, got d = {d}")));
    }
    if resolution < 2 {
        return Err(Error::Config(format!("scan resolution must be at least 2, got {resolution}")));
    }
    if map.dimension() != d {
        return Err(Error::Argument("map and domain dimensions differ".into()));
    }
    let total = resolution.checked_pow(d as u32).ok_or_else(|| Error::Config("scan grid too large".into()))?;
    let step = h / resolution as f64;
    exec.run(total, |range| {
        let mut rows = Vec::with_capacity((range.end - range.start) as usize);
        for i in range {
            let mut q = vec![0.0; d];
            let mut rest = i;
            for axis in (0..d).rev() {
                q[axis] = -h / 2.0 + ((rest % resolution) as f64 + 0.5) * step;
                rest /= resolution;
            }
            let ctx = GridContext::new(h, q.clone())?;
            let k = k_of(map, dom, &ctx)?;
            let sys = discretize(map, dom, &ctx)?;
            let verdict = crate::dynamics::robustness_verdict(&sys);
            rows.push(ScanRow {
                q,
                k,
                robust: verdict.robust,
                equilibrium: verdict.equilibrium.map(|z| ctx.point(&z)),
            });
        }
        Ok(rows)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::builtin_map;

    fn line(lo: f64, hi: f64) -> DomainSpec {
        DomainSpec::cube(lo, hi, 1).unwrap()
    }

    fn linear(a: f64) -> MapSpec {
        builtin_map("scalar-linear", &[a], 1).unwrap()
    }

    /// Splits the range into fixed chunks, as a parallel executor would.
    struct Chunked(u64);

    impl SampleExecutor for Chunked {
        fn run<T, F>(&self, n: u64, job: F) -> Result<T>
        where
            T: Tally,
            F: Fn(Range<u64>) -> Result<T> + Sync,
        {
            let mut acc = T::empty();
            let mut start = 0;
            while start < n {
                let end = (start + self.0).min(n);
                acc = acc.merge(job(start..end)?);
                start = end;
            }
            Ok(acc)
        }
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        for (hits, n) in [(0, 100), (100, 100), (37, 100), (66_667, 100_000)] {
            let e = MeasureEstimate::bernoulli(hits, n, 2.0, 0);
            assert!(e.ci_low <= e.value && e.value <= e.ci_high, "{e:?}");
            assert!(e.ci_low >= 0.0 && e.ci_high <= 2.0);
        }
        let e = MeasureEstimate::bernoulli(0, 100, 1.0, 0);
        assert_eq!((e.value, e.stderr, e.ci_low), (0.0, 0.0, 0.0));
        assert!(e.ci_high > 0.0);
    }

    #[test]
    fn mean_estimate_of_constant_sample() {
        let e = MeasureEstimate::mean(400, 1600, 100, 1.0, 0);
        assert_eq!((e.value, e.stderr), (4.0, 0.0));
    }

    #[test]
    fn too_few_samples() {
        let r = estimate_vs(&linear(0.25), &line(-2.0, 2.0), 1.0, 10, 0, &Sequential);
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn vs_of_quarter_map() {
        let est = estimate_vs(&linear(0.25), &line(-2.0, 2.0), 1.0, 20_000, 3, &Sequential).unwrap();
        assert!((est.all.value - 2.0 / 3.0).abs() < 3.0 * est.all.stderr + 1e-3, "{est:?}");
        assert_eq!(est.gate_pass_fraction, 1.0);
        assert_eq!(est.gated, est.all);
    }

    #[test]
    fn vs_degenerate_cases() {
        let est = estimate_vs(&linear(0.5), &line(-1.0, 1.0), 0.5, 2_000, 1, &Sequential).unwrap();
        assert_eq!(est.all.value, 0.0);
        let est = estimate_vs(&linear(1.0), &line(-2.0, 2.0), 1.0, 2_000, 1, &Sequential).unwrap();
        assert_eq!(est.all.value, 0.0);
    }

    #[test]
    fn near_fixed_examples() {
        let e = estimate_near_fixed_measure(&linear(0.25), &line(-2.0, 2.0), 1.0, 20_000, 5, &Sequential)
            .unwrap();
        assert!((e.value - 4.0 / 3.0).abs() < 3.0 * e.stderr, "{e:?}");
        let e = estimate_near_fixed_measure(&linear(1.0), &line(-2.0, 2.0), 1.0, 1_000, 5, &Sequential)
            .unwrap();
        assert_eq!(e.value, 4.0);
        let shift = builtin_map("shift", &[10.0], 1).unwrap();
        let e = estimate_near_fixed_measure(&shift, &line(-2.0, 2.0), 1.0, 1_000, 5, &Sequential).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn k_integral_examples() {
        let k = estimate_k_integral(&linear(0.25), &line(-2.0, 2.0), 1.0, 20_000, 9, &Sequential).unwrap();
        assert!((k.estimate.value - 4.0 / 3.0).abs() < 3.0 * k.estimate.stderr, "{k:?}");
        assert_eq!(k.violations, 0);
        assert!(k.max_k <= 2);

        let k = estimate_k_integral(&linear(1.0), &line(-2.0, 2.0), 1.0, 1_000, 9, &Sequential).unwrap();
        assert_eq!(k.estimate.value, 4.0);
        let shift = builtin_map("shift", &[10.0], 1).unwrap();
        let k = estimate_k_integral(&shift, &line(-2.0, 2.0), 1.0, 1_000, 9, &Sequential).unwrap();
        assert_eq!(k.estimate.value, 0.0);
    }

    #[test]
    fn bounds_report_quarter_map() {
        let r = bounds_report(&linear(0.25), &line(-2.0, 2.0), 1.0, 20_000, 7, &Sequential).unwrap();
        assert_eq!(r.extent.total, 5);
        assert!(r.hypotheses_verified, "{:?}", r.notes);
        assert!(r.all_checks_pass(), "{:?}", r.checks);
        assert!((r.lower_bound - 2.0 / 3.0).abs() < 3.0 * r.vnear.stderr);
        assert!((r.upper_bound.unwrap() - 11.0 / 12.0).abs() < 3.0 * r.vnear.stderr / 4.0);
    }

    #[test]
    fn bounds_report_without_upper_bound_when_capacity_is_one() {
        let r = bounds_report(&linear(0.25), &line(0.0, 0.3), 1.0, 1_000, 7, &Sequential).unwrap();
        assert_eq!(r.extent.total, 1);
        assert!(r.upper_bound.is_none());
        assert!(r.check(checks::UPPER_BOUND).is_none());
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn executor_split_does_not_change_results() {
        let f = linear(0.25);
        let dom = line(-2.0, 2.0);
        let a = bounds_report(&f, &dom, 1.0, 3_000, 11, &Sequential).unwrap();
        let b = bounds_report(&f, &dom, 1.0, 3_000, 11, &Chunked(7)).unwrap();
        assert_eq!(a, b);
        let s1 = q_grid_scan(&f, &dom, 1.0, 50, &Sequential).unwrap();
        let s2 = q_grid_scan(&f, &dom, 1.0, 50, &Chunked(3)).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn scan_examples() {
        let f = linear(0.25);
        let dom = line(-2.0, 2.0);
        let rows = q_grid_scan(&f, &dom, 1.0, 1000, &Sequential).unwrap();
        let frac = rows.iter().filter(|r| r.k == 1).count() as f64 / rows.len() as f64;
        assert!((0.664..=0.670).contains(&frac), "{frac}");

        let rows = q_grid_scan(&f, &dom, 1.0, 2, &Sequential).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.k == 1 || r.k == 2));

        // Off q = 0 the domain [0, 1] holds a single lattice point, which is
        // fixed exactly when it lies in the near-fixed set (1/4, 3/4].
        let neg = builtin_map("negated-linear", &[1.0], 1).unwrap();
        let rows = q_grid_scan(&neg, &line(0.0, 1.0), 1.0, 64, &Sequential).unwrap();
        for r in &rows {
            assert_eq!(r.robust, r.q[0].abs() > 0.25, "q = {}", r.q[0]);
        }

        let g = builtin_map("scalar-linear", &[0.25], 3).unwrap();
        let cube = DomainSpec::cube(-1.0, 1.0, 3).unwrap();
        assert!(matches!(q_grid_scan(&g, &cube, 1.0, 4, &Sequential), Err(Error::Config(_))));
        assert!(matches!(q_grid_scan(&f, &dom, 1.0, 1, &Sequential), Err(Error::Config(_))));
    }

    #[test]
    fn scan_rows_are_grid_lexicographic() {
        let g = builtin_map("scalar-linear", &[0.25], 2).unwrap();
        let dom = DomainSpec::cube(-2.0, 2.0, 2).unwrap();
        let rows = q_grid_scan(&g, &dom, 1.0, 3, &Sequential).unwrap();
        let qs: Vec<Vec<f64>> = rows.iter().map(|r| r.q.clone()).collect();
        let mut sorted = qs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(qs, sorted);
        assert!((qs[1][0] + 1.0 / 3.0).abs() < 1e-15 && qs[1][1] == 0.0);
    }
}
