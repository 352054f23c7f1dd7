//! The finite system `f_{h,q}` on `L_{h,q} ∩ Ω` and its structure.
//!
//! Convergence questions are answered on the functional graph of the
//! successor table: on a finite set an orbit converges iff it reaches a fixed
//! point in finitely many steps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_domain, round_unchecked, DomainSpec, GridContext, LatticeIndex};
use crate::maps::{check_dimensions, ConditionVerdict, MapSpec, Witness};

/// Image of a lattice point under `f_{h,q}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Successor {
    /// Position of the image in [`DiscretizedSystem::points`].
    Inside(usize),
    /// The image lies outside the domain.
    Escaped(LatticeIndex),
}

/// Enumerated lattice points with the successor table of `f_{h,q}`.
#[derive(Debug, Clone)]
pub struct DiscretizedSystem {
    ctx: GridContext,
    points: Vec<LatticeIndex>,
    successor: Vec<Successor>,
    // f evaluated at each point, row-major n x d
    values: Vec<f64>,
}

/// Builds the successor table of `[f(x)]_{h,q}` over the lattice points of `dom`.
pub fn discretize(map: &MapSpec, dom: &DomainSpec, ctx: &GridContext) -> Result<DiscretizedSystem> {
    check_dimensions(map, dom, ctx)?;
    let points = enumerate_domain(dom, ctx)?;
    let d = ctx.dimension();
    let mut values = vec![0.0; points.len() * d];
    let mut x = vec![0.0; d];
    for (z, fx) in points.iter().zip(values.chunks_exact_mut(d)) {
        ctx.point_into(z, &mut x);
        map.eval_into(&x, fx);
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("map is not finite at {x:?}")));
        }
    }
    let successor = values
        .chunks_exact(d)
        .map(|fx| {
            let image = round_unchecked(fx, ctx);
            match points.binary_search(&image) {
                Ok(pos) => Successor::Inside(pos),
                Err(_) => Successor::Escaped(image),
            }
        })
        .collect();
    Ok(DiscretizedSystem { ctx: ctx.clone(), points, successor, values })
}

impl DiscretizedSystem {
    pub fn ctx(&self) -> &GridContext {
        &self.ctx
    }

    pub fn points(&self) -> &[LatticeIndex] {
        &self.points
    }

    pub fn successors(&self) -> &[Successor] {
        &self.successor
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn position(&self, z: &LatticeIndex) -> Option<usize> {
        self.points.binary_search(z).ok()
    }

    /// `f` evaluated at point `i`, before roundoff.
    pub fn value(&self, i: usize) -> &[f64] {
        let d = self.ctx.dimension();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn has_escapes(&self) -> bool {
        self.successor.iter().any(|s| matches!(s, Successor::Escaped(_)))
    }

    /// Monotonicity of `f` on the enumerated points, from the stored values.
    pub fn monotone_on_points(&self) -> ConditionVerdict {
        let reals: Vec<Vec<f64>> = self.points.iter().map(|z| self.ctx.point(z)).collect();
        let values: Vec<Vec<f64>> = (0..self.len()).map(|i| self.value(i).to_vec()).collect();
        crate::maps::monotone_on_values(&reals, &values)
    }
}

/// `x - h/2 <= f(x) < x + h/2` on every axis.
#[inline]
pub(crate) fn near_fixed(x: &[f64], fx: &[f64], h: f64) -> bool {
    x.iter().zip(fx).all(|(&x, &f)| x - h / 2.0 <= f && f < x + h / 2.0)
}

/// Fixed points of `f_{h,q}`, taken from the successor table and checked
/// against the direct near-fixed condition.
pub fn fixed_points(sys: &DiscretizedSystem) -> Result<Vec<LatticeIndex>> {
    let mut x = vec![0.0; sys.ctx.dimension()];
    let mut out = Vec::new();
    for (i, z) in sys.points.iter().enumerate() {
        let by_table = sys.successor[i] == Successor::Inside(i);
        sys.ctx.point_into(z, &mut x);
        let direct = near_fixed(&x, sys.value(i), sys.ctx.h());
        if by_table != direct {
            return Err(Error::Invariant(format!(
                "fixed-point characterizations disagree at {z}: successor says {by_table}, near-fixed test says {direct}"
            )));
        }
        if by_table {
            out.push(z.clone());
        }
    }
    Ok(out)
}

/// Number of lattice points of `dom` satisfying the near-fixed condition.
pub fn k_of(map: &MapSpec, dom: &DomainSpec, ctx: &GridContext) -> Result<usize> {
    check_dimensions(map, dom, ctx)?;
    let d = ctx.dimension();
    let mut x = vec![0.0; d];
    let mut fx = vec![0.0; d];
    let mut count = 0;
    for z in enumerate_domain(dom, ctx)? {
        ctx.point_into(&z, &mut x);
        map.eval_into(&x, &mut fx);
        if near_fixed(&x, &fx, ctx.h()) {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    pub period: usize,
    /// Positions in the point list, starting from the smallest and following
    /// the successor map.
    pub members: Vec<usize>,
    /// Number of points whose orbit ends in this cycle, members included.
    pub basin: usize,
}

/// Decomposition of the functional graph into cycles with their basins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub cycles: Vec<Cycle>,
    /// Points whose orbit leaves the domain.
    pub escaped: usize,
    /// For each point, the index into `cycles` its orbit ends in, or `None`
    /// when it escapes.
    pub attractor: Vec<Option<usize>>,
}

impl CycleReport {
    pub fn has_nontrivial_cycle(&self) -> bool {
        self.cycles.iter().any(|c| c.period > 1)
    }

    pub fn fixed_point_count(&self) -> usize {
        self.cycles.iter().filter(|c| c.period == 1).count()
    }
}

/// Linear-time functional-graph decomposition with iterative colouring.
pub fn analyze_cycles(sys: &DiscretizedSystem) -> CycleReport {
    const UNSEEN: u8 = 0;
    const ON_PATH: u8 = 1;
    const DONE: u8 = 2;

    let n = sys.len();
    let mut state = vec![UNSEEN; n];
    let mut attractor: Vec<Option<usize>> = vec![None; n];
    let mut cycles: Vec<Cycle> = Vec::new();
    let mut path = Vec::new();

    for start in 0..n {
        if state[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut cur = start;
        let outcome = loop {
            state[cur] = ON_PATH;
            path.push(cur);
            match &sys.successor[cur] {
                Successor::Escaped(_) => break None,
                Successor::Inside(next) => {
                    let next = *next;
                    match state[next] {
                        UNSEEN => cur = next,
                        DONE => break attractor[next],
                        _ => {
                            // closed a new cycle at `next`
                            let at = path.iter().position(|&p| p == next).unwrap_or(0);
                            let mut members = path[at..].to_vec();
                            let min_at = members
                                .iter()
                                .enumerate()
                                .min_by_key(|(_, &m)| m)
                                .map_or(0, |(k, _)| k);
                            members.rotate_left(min_at);
                            cycles.push(Cycle { period: members.len(), members, basin: 0 });
                            break Some(cycles.len() - 1);
                        }
                    }
                }
            }
        };
        for &p in &path {
            state[p] = DONE;
            attractor[p] = outcome;
        }
    }

    let mut escaped = 0;
    for a in &attractor {
        match a {
            Some(c) => cycles[*c].basin += 1,
            None => escaped += 1,
        }
    }
    CycleReport { cycles, escaped, attractor }
}

/// Why a system is or is not dynamically robust.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RobustnessReason {
    UniqueEquilibrium,
    NoEquilibrium,
    MultipleEquilibria(Vec<LatticeIndex>),
    NontrivialCycle { period: usize, members: Vec<LatticeIndex> },
    OrbitEscape { from: LatticeIndex, image: LatticeIndex },
}

impl RobustnessReason {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::UniqueEquilibrium => "unique-equilibrium-global-convergence",
            Self::NoEquilibrium => "no-equilibrium",
            Self::MultipleEquilibria(_) => "multiple-equilibria",
            Self::NontrivialCycle { .. } => "nontrivial-cycle",
            Self::OrbitEscape { .. } => "orbit-escape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessVerdict {
    pub robust: bool,
    pub equilibrium: Option<LatticeIndex>,
    pub reason: RobustnessReason,
}

/// Robust iff there is exactly one fixed point, no cycle of period above
/// one, and no orbit leaves the domain.
///
/// When several defects are present the reported reason is the first of:
/// escape, nontrivial cycle, multiple equilibria, no equilibrium.
pub fn robustness_verdict(sys: &DiscretizedSystem) -> RobustnessVerdict {
    robustness_from_cycles(sys, &analyze_cycles(sys))
}

pub fn robustness_from_cycles(sys: &DiscretizedSystem, report: &CycleReport) -> RobustnessVerdict {
    let not_robust = |reason| RobustnessVerdict { robust: false, equilibrium: None, reason };
    if let Some((i, Successor::Escaped(image))) = sys
        .successor
        .iter()
        .enumerate()
        .find(|(_, s)| matches!(s, Successor::Escaped(_)))
    {
        return not_robust(RobustnessReason::OrbitEscape {
            from: sys.points[i].clone(),
            image: image.clone(),
        });
    }
    if let Some(c) = report.cycles.iter().find(|c| c.period > 1) {
        return not_robust(RobustnessReason::NontrivialCycle {
            period: c.period,
            members: c.members.iter().map(|&m| sys.points[m].clone()).collect(),
        });
    }
    let mut fixed: Vec<LatticeIndex> = report
        .cycles
        .iter()
        .filter(|c| c.period == 1)
        .map(|c| sys.points[c.members[0]].clone())
        .collect();
    match fixed.len() {
        0 => not_robust(RobustnessReason::NoEquilibrium),
        1 => RobustnessVerdict {
            robust: true,
            equilibrium: fixed.pop(),
            reason: RobustnessReason::UniqueEquilibrium,
        },
        _ => {
            fixed.sort();
            not_robust(RobustnessReason::MultipleEquilibria(fixed))
        }
    }
}

/// Iterates `f_{h,q}` from an order-comparable start until a fixed point.
///
/// Returns the fixed point and the number of applications of `f_{h,q}`.
/// On a monotone system this terminates within the point count; the hard
/// cap is point count + 1 steps.
pub fn tarski_iterate(sys: &DiscretizedSystem, start: &LatticeIndex) -> Result<(LatticeIndex, usize)> {
    let first = sys
        .position(start)
        .ok_or_else(|| Error::Argument(format!("start {start} is not a lattice point of the domain")))?;
    match &sys.successor[first] {
        Successor::Inside(next) => {
            let image = &sys.points[*next];
            if !image.comparable(start) {
                return Err(Error::Precondition(format!(
                    "start {start} and its image {image} are not order-comparable"
                )));
            }
        }
        Successor::Escaped(image) => {
            return Err(Error::Escaped { visited: vec![start.clone()], image: image.clone() });
        }
    }
    let cap = sys.len() + 1;
    let mut visited = Vec::new();
    let mut cur = first;
    for steps in 0..cap {
        match &sys.successor[cur] {
            Successor::Inside(next) if *next == cur => return Ok((sys.points[cur].clone(), steps)),
            Successor::Inside(next) => {
                visited.push(sys.points[cur].clone());
                cur = *next;
            }
            Successor::Escaped(image) => {
                visited.push(sys.points[cur].clone());
                return Err(Error::Escaped { visited, image: image.clone() });
            }
        }
    }
    Err(Error::Divergence { visited })
}

/// The two structural claims checked against a robust monotone system with
/// equilibrium `x*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposition1Report {
    /// Every `x >= x*` maps to `x*` in one step.
    pub one_step_from_above: ConditionVerdict,
    /// Every `x <= x*` reaches `x*` in finitely many steps.
    pub reaches_from_below: ConditionVerdict,
    /// Points `x >= x*` that needed more than one step.
    pub above_failures: usize,
}

impl Proposition1Report {
    pub fn verdict(&self) -> ConditionVerdict {
        if !self.one_step_from_above.satisfied {
            self.one_step_from_above.clone()
        } else {
            self.reaches_from_below.clone()
        }
    }
}

pub fn proposition1_check(sys: &DiscretizedSystem, verdict: &RobustnessVerdict) -> Result<Proposition1Report> {
    let eq = match (&verdict.robust, &verdict.equilibrium) {
        (true, Some(eq)) => eq,
        _ => return Err(Error::Precondition("the system is not robust".into())),
    };
    let target = sys
        .position(eq)
        .ok_or_else(|| Error::Argument(format!("equilibrium {eq} is not a lattice point of the domain")))?;

    let steps_to_target = |from: usize| -> Option<usize> {
        let mut cur = from;
        for steps in 0..=sys.len() {
            if cur == target {
                return Some(steps);
            }
            match sys.successor[cur] {
                Successor::Inside(next) => cur = next,
                Successor::Escaped(_) => return None,
            }
        }
        None
    };

    let mut above = ConditionVerdict::holds();
    let mut above_failures = 0;
    let mut below = ConditionVerdict::holds();
    for (i, z) in sys.points.iter().enumerate() {
        if i == target {
            continue;
        }
        if z.ge(eq) && sys.successor[i] != Successor::Inside(target) {
            above_failures += 1;
            if above.satisfied {
                above = ConditionVerdict::violated(Witness::Orbit { x: z.clone(), steps: steps_to_target(i) });
            }
        }
        if z.le(eq) && below.satisfied && steps_to_target(i).is_none() {
            below = ConditionVerdict::violated(Witness::Orbit { x: z.clone(), steps: None });
        }
    }
    Ok(Proposition1Report { one_step_from_above: above, reaches_from_below: below, above_failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::builtin_map;

    fn quarter() -> MapSpec {
        builtin_map("scalar-linear", &[0.25], 1).unwrap()
    }

    fn interval(lo: f64, hi: f64) -> DomainSpec {
        DomainSpec::cube(lo, hi, 1).unwrap()
    }

    fn ctx1(h: f64, q: f64) -> GridContext {
        GridContext::from_offset(h, &[q]).unwrap()
    }

    fn reals(sys: &DiscretizedSystem, pts: &[LatticeIndex]) -> Vec<f64> {
        pts.iter().map(|z| sys.ctx().point(z)[0]).collect()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn discretize_quarter_map() {
        let sys = discretize(&quarter(), &interval(-2.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        let images: Vec<f64> = sys
            .successors()
            .iter()
            .map(|s| match s {
                Successor::Inside(j) => sys.ctx().point(&sys.points()[*j])[0],
                Successor::Escaped(_) => f64::NAN,
            })
            .collect();
        assert_eq!(images, vec![0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn discretize_identity_and_escape() {
        let id = builtin_map("scalar-linear", &[1.0], 1).unwrap();
        let sys = discretize(&id, &interval(-1.0, 1.0), &ctx1(0.5, 0.0)).unwrap();
        for (i, s) in sys.successors().iter().enumerate() {
            assert_eq!(*s, Successor::Inside(i));
        }
        let shift = builtin_map("shift", &[10.0], 1).unwrap();
        let sys = discretize(&shift, &interval(-2.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        assert!(sys.successors().iter().all(|s| matches!(s, Successor::Escaped(_))));
        let v = robustness_verdict(&sys);
        assert!(!v.robust);
        assert_eq!(v.reason.tag(), "orbit-escape");
    }

    #[test]
    fn fixed_points_examples() {
        let dom = interval(-2.0, 2.0);
        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 0.0)).unwrap();
        assert_eq!(reals(&sys, &fixed_points(&sys).unwrap()), vec![0.0]);

        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 2.0 / 3.0)).unwrap();
        assert!(close(&reals(&sys, &fixed_points(&sys).unwrap()), &[-1.0 / 3.0, 2.0 / 3.0]));

        let id = builtin_map("scalar-linear", &[1.0], 1).unwrap();
        let sys = discretize(&id, &dom, &ctx1(0.5, 0.25)).unwrap();
        assert_eq!(fixed_points(&sys).unwrap().len(), sys.len());
    }

    #[test]
    fn k_of_examples() {
        let dom = interval(-2.0, 2.0);
        assert_eq!(k_of(&quarter(), &dom, &ctx1(1.0, 0.0)).unwrap(), 1);
        assert_eq!(k_of(&quarter(), &dom, &ctx1(1.0, 2.0 / 3.0)).unwrap(), 2);
        let half = builtin_map("scalar-linear", &[0.5], 1).unwrap();
        assert_eq!(k_of(&half, &interval(-1.0, 1.0), &ctx1(0.5, 0.0)).unwrap(), 2);
    }

    #[test]
    fn cycles_of_reflection() {
        let neg = builtin_map("negated-linear", &[1.0], 1).unwrap();
        let sys = discretize(&neg, &interval(0.0, 1.0), &ctx1(1.0, 0.0)).unwrap();
        assert_eq!(sys.successors(), &[Successor::Inside(1), Successor::Inside(0)]);
        let r = analyze_cycles(&sys);
        assert_eq!(r.cycles, vec![Cycle { period: 2, members: vec![0, 1], basin: 2 }]);
        let v = robustness_verdict(&sys);
        assert!(!v.robust);
        assert!(matches!(v.reason, RobustnessReason::NontrivialCycle { period: 2, .. }));
    }

    #[test]
    fn cycles_of_quarter_map_and_identity() {
        let sys = discretize(&quarter(), &interval(-2.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        let r = analyze_cycles(&sys);
        assert_eq!(r.cycles, vec![Cycle { period: 1, members: vec![2], basin: 5 }]);
        assert_eq!(r.escaped, 0);

        let id = builtin_map("scalar-linear", &[1.0], 2).unwrap();
        let dom = DomainSpec::cube(-1.0, 1.0, 2).unwrap();
        let sys = discretize(&id, &dom, &GridContext::origin(0.5, 2).unwrap()).unwrap();
        let r = analyze_cycles(&sys);
        assert_eq!(r.cycles.len(), 25);
        assert!(r.cycles.iter().all(|c| c.period == 1 && c.basin == 1));
    }

    #[test]
    fn cycle_report_with_partial_escape() {
        // every orbit drifts up to 2, whose image 3.6 leaves the domain
        let f = builtin_map("shift", &[1.6], 1).unwrap();
        let sys = discretize(&f, &interval(-2.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        let r = analyze_cycles(&sys);
        assert!(r.cycles.is_empty());
        assert_eq!(r.escaped, 5);
    }

    #[test]
    fn robustness_examples() {
        let dom = interval(-2.0, 2.0);
        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 1.0 / 3.0)).unwrap();
        assert!(close(&reals(&sys, sys.points()), &[-5.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0, 4.0 / 3.0]));
        let v = robustness_verdict(&sys);
        assert!(v.robust);
        assert!(close(&[sys.ctx().point(v.equilibrium.as_ref().unwrap())[0]], &[1.0 / 3.0]));

        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 2.0 / 3.0)).unwrap();
        let v = robustness_verdict(&sys);
        assert!(!v.robust);
        match v.reason {
            RobustnessReason::MultipleEquilibria(eqs) => {
                assert!(close(&reals(&sys, &eqs), &[-1.0 / 3.0, 2.0 / 3.0]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tarski_examples() {
        let sys = discretize(&quarter(), &interval(-2.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        let u1 = LatticeIndex::new(vec![-2]);
        let u2 = LatticeIndex::new(vec![2]);
        assert_eq!(tarski_iterate(&sys, &u1).unwrap(), (LatticeIndex::new(vec![0]), 1));
        assert_eq!(tarski_iterate(&sys, &u2).unwrap(), (LatticeIndex::new(vec![0]), 2));
        let zero = LatticeIndex::new(vec![0]);
        assert_eq!(tarski_iterate(&sys, &zero).unwrap(), (zero.clone(), 0));
        assert!(matches!(tarski_iterate(&sys, &LatticeIndex::new(vec![9])), Err(Error::Argument(_))));
    }

    #[test]
    fn tarski_reports_divergence_on_cycles() {
        let neg = builtin_map("negated-linear", &[1.0], 1).unwrap();
        let sys = discretize(&neg, &interval(0.0, 1.0), &ctx1(1.0, 0.0)).unwrap();
        match tarski_iterate(&sys, &LatticeIndex::new(vec![0])) {
            Err(Error::Divergence { visited }) => assert_eq!(visited.len(), 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn proposition1_examples() {
        let dom = interval(-2.0, 2.0);
        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 1.0 / 3.0)).unwrap();
        let r = proposition1_check(&sys, &robustness_verdict(&sys)).unwrap();
        assert!(r.one_step_from_above.satisfied && r.reaches_from_below.satisfied);

        let sys = discretize(&quarter(), &dom, &ctx1(1.0, 0.0)).unwrap();
        let v = robustness_verdict(&sys);
        assert!(v.robust);
        let r = proposition1_check(&sys, &v).unwrap();
        assert!(r.reaches_from_below.satisfied);
        assert_eq!(r.above_failures, 1);
        assert_eq!(
            r.one_step_from_above.witness,
            Some(Witness::Orbit { x: LatticeIndex::new(vec![2]), steps: Some(2) })
        );

        let neg = builtin_map("negated-linear", &[1.0], 1).unwrap();
        let sys = discretize(&neg, &interval(0.0, 1.0), &ctx1(1.0, 0.0)).unwrap();
        assert!(matches!(proposition1_check(&sys, &robustness_verdict(&sys)), Err(Error::Precondition(_))));
    }

    #[test]
    fn proposition1_vacuous_above_when_equilibrium_is_maximal() {
        // f(x) = x/2 + 1 on [0, 2], h = 1, q = 0: 0 -> 1 -> 2 (fixed: 2 rounds from 2.0)
        let f = MapSpec::affine(vec![0.5], vec![1.0]).unwrap();
        let sys = discretize(&f, &interval(0.0, 2.0), &ctx1(1.0, 0.0)).unwrap();
        let v = robustness_verdict(&sys);
        assert_eq!(v.equilibrium, Some(LatticeIndex::new(vec![2])));
        let r = proposition1_check(&sys, &v).unwrap();
        assert!(r.verdict().satisfied);
    }
}
