//! Maps `f: R^d -> R^d`, the built-in families, and finite checks of the
//! hypotheses the measure bounds rely on.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_domain, round_unchecked, DomainSpec, GridContext, LatticeIndex,
};
use crate::rng::{Purpose, Substream};

pub type MapFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

#[derive(Clone)]
pub enum MapKind {
    /// `A x + b`, `A` row-major `d x d`.
    Affine { matrix: Vec<f64>, offset: Vec<f64> },
    /// `a x`.
    ScalarLinear { slope: f64 },
    /// `amplitude * tanh(steepness * x_i)` per coordinate.
    Sigmoid { amplitude: f64, steepness: f64 },
    /// `c - x_i` per coordinate.
    NegatedLinear { c: f64 },
    /// `x_i + c` per coordinate.
    Shift { c: f64 },
    Custom(Arc<MapFn>),
}

/// A deterministic map together with a monotonicity claim and reporting
/// metadata.
#[derive(Clone)]
pub struct MapSpec {
    dimension: usize,
    kind: MapKind,
    declared_monotone: bool,
    family: String,
    params: Vec<f64>,
}

impl fmt::Debug for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSpec")
            .field("family", &self.family)
            .field("dimension", &self.dimension)
            .field("params", &self.params)
            .field("declared_monotone", &self.declared_monotone)
            .finish()
    }
}

/// Names accepted by [`builtin_map`].
pub const FAMILIES: &[&str] = &["affine", "scalar-linear", "sigmoid", "negated-linear", "shift"];

/// Builds one of the built-in families.
///
/// Parameter layouts:
///
/// | family           | params                        |
/// |------------------|-------------------------------|
/// | `affine`         | `A` row-major (`d*d`), then `b` (`d`) |
/// | `scalar-linear`  | `[a]`                         |
/// | `sigmoid`        | `[amplitude, steepness]`      |
/// | `negated-linear` | `[c]`                         |
/// | `shift`          | `[c]`                         |
pub fn builtin_map(family: &str, params: &[f64], dimension: usize) -> Result<MapSpec> {
    if dimension == 0 {
        return Err(Error::Config("map dimension must be at least 1".into()));
    }
    if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
        return Err(Error::Config(format!("{family}: parameter {bad} is not finite")));
    }
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{family} in dimension {dimension} takes {n} parameters, got {}",
                params.len()
            )))
        }
    };
    let (kind, monotone) = match family {
        "affine" => {
            want(dimension * dimension + dimension)?;
            let (m, b) = params.split_at(dimension * dimension);
            let monotone = m.iter().all(|&a| a >= 0.0);
            (MapKind::Affine { matrix: m.to_vec(), offset: b.to_vec() }, monotone)
        }
        "scalar-linear" => {
            want(1)?;
            (MapKind::ScalarLinear { slope: params[0] }, params[0] >= 0.0)
        }
        "sigmoid" => {
            want(2)?;
            let (amplitude, steepness) = (params[0], params[1]);
            let monotone = amplitude * steepness >= 0.0;
            (MapKind::Sigmoid { amplitude, steepness }, monotone)
        }
        "negated-linear" => {
            want(1)?;
            (MapKind::NegatedLinear { c: params[0] }, false)
        }
        "shift" => {
            want(1)?;
            (MapKind::Shift { c: params[0] }, true)
        }
        other => return Err(Error::Config(format!("unknown map family `{other}`"))),
    };
    Ok(MapSpec {
        dimension,
        kind,
        declared_monotone: monotone,
        family: family.to_string(),
        params: params.to_vec(),
    })
}

impl MapSpec {
    /// Wraps an arbitrary pure function. `declared_monotone` is a claim that
    /// the checkers can test, not something that is trusted.
    pub fn custom(
        name: &str,
        dimension: usize,
        declared_monotone: bool,
        f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            kind: MapKind::Custom(Arc::new(f)),
            declared_monotone,
            family: name.to_string(),
            params: Vec::new(),
        }
    }

    pub fn affine(matrix: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        let d = offset.len();
        let mut params = matrix;
        params.extend_from_slice(&offset);
        builtin_map("affine", &params, d)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn declared_monotone(&self) -> bool {
        self.declared_monotone
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Writes `f(x)` into `out`. Both slices must have length `dimension`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(out.len(), self.dimension);
        match &self.kind {
            MapKind::Affine { matrix, offset } => {
                let d = self.dimension;
                for i in 0..d {
                    let row = &matrix[i * d..(i + 1) * d];
                    out[i] = row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + offset[i];
                }
            }
            MapKind::ScalarLinear { slope } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = slope * v;
                }
            }
            MapKind::Sigmoid { amplitude, steepness } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = amplitude * libm::tanh(steepness * v);
                }
            }
            MapKind::NegatedLinear { c } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = c - v;
                }
            }
            MapKind::Shift { c } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = v + c;
                }
            }
            MapKind::Custom(f) => f(x, out),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.eval_into(x, &mut out);
        out
    }

    /// Conjugates by the per-axis reflection `S = diag(signs)`:
    /// `g(x) = S f(S x)`.
    ///
    /// A map that preserves the orthant order `S x <= S y` becomes one that
    /// preserves the standard order. Affine maps stay affine with matrix
    /// `S A S` and offset `S b`, so their monotonicity claim is recomputed
    /// exactly; other maps keep a `false` claim.
    pub fn conjugate_by_reflection(&self, signs: &[bool]) -> Result<MapSpec> {
        if signs.len() != self.dimension {
            return Err(Error::Argument(format!(
                "reflection has {} axes, map has dimension {}",
                signs.len(),
                self.dimension
            )));
        }
        let s: Vec<f64> = signs.iter().map(|&neg| if neg { -1.0 } else { 1.0 }).collect();
        if let MapKind::Affine { matrix, offset } = &self.kind {
            let d = self.dimension;
            let m = (0..d * d).map(|k| s[k / d] * matrix[k] * s[k % d]).collect();
            let b = offset.iter().zip(&s).map(|(b, s)| b * s).collect();
            return MapSpec::affine(m, b);
        }
        let inner = self.clone();
        let name = format!("reflected({})", self.family);
        let d = self.dimension;
        Ok(MapSpec::custom(&name, d, false, move |x, out| {
            let sx: Vec<f64> = x.iter().zip(&s).map(|(v, s)| v * s).collect();
            inner.eval_into(&sx, out);
            for (o, s) in out.iter_mut().zip(&s) {
                *o *= s;
            }
        }))
    }

    /// Exact image of the box `[lower, upper]` for the families where it is
    /// available in closed form. Affine images use interval arithmetic per
    /// row, which is exact for a box.
    pub fn image_box(&self, dom: &DomainSpec) -> Option<(Vec<f64>, Vec<f64>)> {
        let (a, b) = (dom.lower(), dom.upper());
        let d = self.dimension;
        if dom.dimension() != d {
            return None;
        }
        match &self.kind {
            MapKind::Affine { matrix, offset } => {
                let mut lo = offset.clone();
                let mut hi = offset.clone();
                for i in 0..d {
                    for j in 0..d {
                        let m = matrix[i * d + j];
                        let (p, q) = (m * a[j], m * b[j]);
                        lo[i] += p.min(q);
                        hi[i] += p.max(q);
                    }
                }
                Some((lo, hi))
            }
            MapKind::ScalarLinear { slope } => Some(
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| (slope * x).min(slope * y))
                    .zip(a.iter().zip(b).map(|(&x, &y)| (slope * x).max(slope * y)))
                    .unzip(),
            ),
            MapKind::Shift { c } => Some((
                a.iter().map(|x| x + c).collect(),
                b.iter().map(|x| x + c).collect(),
            )),
            MapKind::NegatedLinear { c } => Some((
                b.iter().map(|x| c - x).collect(),
                a.iter().map(|x| c - x).collect(),
            )),
            MapKind::Sigmoid { amplitude, steepness } => {
                let ends = |x: f64| amplitude * libm::tanh(steepness * x);
                Some(
                    a.iter()
                        .zip(b)
                        .map(|(&x, &y)| (ends(x).min(ends(y)), ends(x).max(ends(y))))
                        .unzip(),
                )
            }
            MapKind::Custom(_) => None,
        }
    }
}

/// Counterexample attached to a failed check. Each variant carries enough
/// to re-evaluate the violation.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `x <= y` but `f(x) <= f(y)` fails on some axis.
    Monotone { x: Vec<f64>, y: Vec<f64>, fx: Vec<f64>, fy: Vec<f64> },
    /// The roundoff of `f(x)` is outside the domain.
    SelfMapping { x: LatticeIndex, image: LatticeIndex, image_point: Vec<f64> },
    /// `f(x)` is within `h/2` of the box boundary on `axis`.
    Margin { x: Vec<f64>, fx: Vec<f64>, axis: usize },
    /// A lattice point for which a structural claim about the discretized
    /// system fails. `steps` is the number of steps actually needed to reach
    /// the equilibrium, when it is reached.
    Orbit { x: LatticeIndex, steps: Option<usize> },
}

/// Result of a hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionVerdict {
    pub satisfied: bool,
    pub witness: Option<Witness>,
}

impl ConditionVerdict {
    pub fn holds() -> Self {
        Self { satisfied: true, witness: None }
    }

    pub fn violated(witness: Witness) -> Self {
        Self { satisfied: false, witness: Some(witness) }
    }
}

/// Checks `f(x) <= f(y)` for every comparable pair `x <= y` among `points`.
pub fn check_monotone(map: &MapSpec, points: &[Vec<f64>]) -> ConditionVerdict {
    let values: Vec<Vec<f64>> = points.iter().map(|x| map.eval(x)).collect();
    monotone_on_values(points, &values)
}

/// Same as [`check_monotone`] for lattice points of `ctx`.
pub fn check_monotone_on_lattice(
    map: &MapSpec,
    points: &[LatticeIndex],
    ctx: &GridContext,
) -> ConditionVerdict {
    let reals: Vec<Vec<f64>> = points.iter().map(|z| ctx.point(z)).collect();
    check_monotone(map, &reals)
}

pub(crate) fn monotone_on_values(points: &[Vec<f64>], values: &[Vec<f64>]) -> ConditionVerdict {
    let le = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x <= y);
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i != j && le(&points[i], &points[j]) && !le(&values[i], &values[j]) {
                return ConditionVerdict::violated(Witness::Monotone {
                    x: points[i].clone(),
                    y: points[j].clone(),
                    fx: values[i].clone(),
                    fy: values[j].clone(),
                });
            }
        }
    }
    ConditionVerdict::holds()
}

/// Checks that `f_{h,q}` maps the lattice points of `dom` into `dom`.
pub fn check_self_mapping(
    map: &MapSpec,
    dom: &DomainSpec,
    ctx: &GridContext,
) -> Result<ConditionVerdict> {
    check_dimensions(map, dom, ctx)?;
    let points = enumerate_domain(dom, ctx)?;
    let mut x = vec![0.0; ctx.dimension()];
    let mut fx = vec![0.0; ctx.dimension()];
    for z in points {
        ctx.point_into(&z, &mut x);
        map.eval_into(&x, &mut fx);
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("map is not finite at {x:?}")));
        }
        let image = round_unchecked(&fx, ctx);
        let image_point = ctx.point(&image);
        if !dom.contains(&image_point) {
            return Ok(ConditionVerdict::violated(Witness::SelfMapping { x: z, image, image_point }));
        }
    }
    Ok(ConditionVerdict::holds())
}

/// Sampled check that `f(x)` stays at least `h/2` inside the box on every
/// axis. A pass means "not falsified by `n_samples` uniform samples".
pub fn check_margin(
    map: &MapSpec,
    dom: &DomainSpec,
    h: f64,
    n_samples: u64,
    seed: u64,
) -> Result<ConditionVerdict> {
    margin_preconditions(map, dom, h)?;
    let (a, b) = (dom.lower(), dom.upper());
    let d = dom.dimension();
    let mut x = vec![0.0; d];
    let mut fx = vec![0.0; d];
    for n in 0..n_samples {
        let mut rng = Substream::new(seed, Purpose::Margin, n);
        for i in 0..d {
            x[i] = a[i] + (b[i] - a[i]) * rng.unit();
        }
        map.eval_into(&x, &mut fx);
        for i in 0..d {
            if !(fx[i] >= a[i] + h / 2.0 && fx[i] <= b[i] - h / 2.0) {
                return Ok(ConditionVerdict::violated(Witness::Margin {
                    x: x.clone(),
                    fx: fx.clone(),
                    axis: i,
                }));
            }
        }
    }
    Ok(ConditionVerdict::holds())
}

/// Exact version of [`check_margin`] using [`MapSpec::image_box`]. Returns
/// `None` when the map has no closed-form image.
pub fn check_margin_exact(map: &MapSpec, dom: &DomainSpec, h: f64) -> Result<Option<bool>> {
    margin_preconditions(map, dom, h)?;
    Ok(map.image_box(dom).map(|(lo, hi)| {
        (0..dom.dimension())
            .all(|i| lo[i] >= dom.lower()[i] + h / 2.0 && hi[i] <= dom.upper()[i] - h / 2.0)
    }))
}

fn margin_preconditions(map: &MapSpec, dom: &DomainSpec, h: f64) -> Result<()> {
    if !dom.is_box() {
        return Err(Error::Config(
            "the boundary margin check needs a box domain; predicate domains have no boundary representation"
                .into(),
        ));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Argument(format!("spacing {h} must be positive")));
    }
    if map.dimension() != dom.dimension() {
        return Err(Error::Argument("map and domain dimensions differ".into()));
    }
    for (i, (a, b)) in dom.lower().iter().zip(dom.upper()).enumerate() {
        if b - a < h {
            return Err(Error::Config(format!(
                "axis {} has width {} < h = {h}; no point is h/2 inside the box",
                i + 1,
                b - a
            )));
        }
    }
    Ok(())
}

pub(crate) fn check_dimensions(map: &MapSpec, dom: &DomainSpec, ctx: &GridContext) -> Result<()> {
    if map.dimension() != ctx.dimension() || dom.dimension() != ctx.dimension() {
        return Err(Error::Argument(format!(
            "dimension mismatch: map {}, domain {}, lattice {}",
            map.dimension(),
            dom.dimension(),
            ctx.dimension()
        )));
    }
    Ok(())
}

impl Witness {
    /// Re-evaluates the counterexample and reports whether it still shows a
    /// violation.
    pub fn recheck(&self, map: &MapSpec, dom: &DomainSpec, ctx: &GridContext) -> bool {
        match self {
            Witness::Monotone { x, y, .. } => {
                let (fx, fy) = (map.eval(x), map.eval(y));
                x.iter().zip(y).all(|(a, b)| a <= b) && fx.iter().zip(&fy).any(|(a, b)| a > b)
            }
            Witness::SelfMapping { x, .. } => {
                let image = round_unchecked(&map.eval(&ctx.point(x)), ctx);
                !dom.contains(&ctx.point(&image))
            }
            Witness::Margin { x, axis, .. } => {
                let fx = map.eval(x);
                let h = ctx.h();
                !(fx[*axis] >= dom.lower()[*axis] + h / 2.0 && fx[*axis] <= dom.upper()[*axis] - h / 2.0)
            }
            Witness::Orbit { .. } => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Vec<Vec<f64>> {
        points.iter().map(|&p| vec![p]).collect()
    }

    #[test]
    fn builtin_families() {
        let f = builtin_map("scalar-linear", &[0.25], 1).unwrap();
        assert!(f.declared_monotone());
        assert_eq!(f.eval(&[2.0]), vec![0.5]);

        let g = MapSpec::affine(vec![0.25, 0.125, 0.0, 0.25], vec![0.0, 0.0]).unwrap();
        assert!(g.declared_monotone());
        assert_eq!(g.eval(&[1.0, 2.0]), vec![0.5, 0.5]);

        let n = builtin_map("negated-linear", &[1.0], 1).unwrap();
        assert!(!n.declared_monotone());
        assert_eq!(n.eval(&[0.25]), vec![0.75]);

        assert!(!builtin_map("scalar-linear", &[-0.5], 1).unwrap().declared_monotone());
        assert!(builtin_map("sigmoid", &[0.5, 2.0], 2).unwrap().declared_monotone());
        assert_eq!(builtin_map("shift", &[10.0], 1).unwrap().eval(&[1.0]), vec![11.0]);
        assert!(matches!(builtin_map("foo", &[], 1), Err(Error::Config(_))));
        assert!(matches!(builtin_map("affine", &[1.0, 2.0], 2), Err(Error::Config(_))));
        assert!(matches!(builtin_map("shift", &[f64::NAN], 1), Err(Error::Config(_))));
    }

    #[test]
    fn monotone_checks() {
        let f = builtin_map("scalar-linear", &[0.25], 1).unwrap();
        assert!(check_monotone(&f, &line(&[-2.0, -1.0, 0.0, 1.0, 2.0])).satisfied);

        let g = builtin_map("negated-linear", &[1.0], 1).unwrap();
        let v = check_monotone(&g, &line(&[0.0, 1.0]));
        assert!(!v.satisfied);
        assert_eq!(
            v.witness,
            Some(Witness::Monotone { x: vec![0.0], y: vec![1.0], fx: vec![1.0], fy: vec![0.0] })
        );
        let dom = DomainSpec::cube(0.0, 1.0, 1).unwrap();
        let ctx = GridContext::origin(1.0, 1).unwrap();
        assert!(v.witness.unwrap().recheck(&g, &dom, &ctx));
    }

    #[test]
    fn monotone_affine_on_2d_lattice_exhaustive() {
        let f = MapSpec::affine(vec![0.25, 0.125, 0.0, 0.25], vec![0.0, 0.0]).unwrap();
        let dom = DomainSpec::cube(-2.0, 2.0, 2).unwrap();
        let ctx = GridContext::origin(1.0, 2).unwrap();
        let pts = enumerate_domain(&dom, &ctx).unwrap();
        assert_eq!(pts.len(), 25);
        assert!(check_monotone_on_lattice(&f, &pts, &ctx).satisfied);

        let mut bad = 0;
        let reals: Vec<Vec<f64>> = pts.iter().map(|z| ctx.point(z)).collect();
        for x in &reals {
            for y in &reals {
                if x[0] <= y[0] && x[1] <= y[1] {
                    let (fx, fy) = (f.eval(x), f.eval(y));
                    if fx[0] > fy[0] || fx[1] > fy[1] {
                        bad += 1;
                    }
                }
            }
        }
        assert_eq!(bad, 0);
    }

    #[test]
    fn self_mapping() {
        let dom = DomainSpec::cube(-2.0, 2.0, 1).unwrap();
        let f = builtin_map("scalar-linear", &[0.25], 1).unwrap();
        for q in [0.0, 0.5, -0.25, 1.0 / 3.0, 0.125] {
            let ctx = GridContext::new(1.0, vec![q]).unwrap();
            assert!(check_self_mapping(&f, &dom, &ctx).unwrap().satisfied, "q = {q}");
        }
        let ctx = GridContext::origin(1.0, 1).unwrap();
        let shift = builtin_map("shift", &[10.0], 1).unwrap();
        let v = check_self_mapping(&shift, &dom, &ctx).unwrap();
        assert!(!v.satisfied);
        assert!(v.witness.unwrap().recheck(&shift, &dom, &ctx));

        let id = builtin_map("scalar-linear", &[1.0], 1).unwrap();
        let dom = DomainSpec::cube(-1.0, 1.0, 1).unwrap();
        let ctx = GridContext::origin(0.5, 1).unwrap();
        assert!(check_self_mapping(&id, &dom, &ctx).unwrap().satisfied);
    }

    #[test]
    fn margin() {
        let dom = DomainSpec::cube(-2.0, 2.0, 1).unwrap();
        let f = builtin_map("scalar-linear", &[0.25], 1).unwrap();
        assert!(check_margin(&f, &dom, 1.0, 10_000, 1).unwrap().satisfied);
        assert_eq!(check_margin_exact(&f, &dom, 1.0).unwrap(), Some(true));

        let id = builtin_map("scalar-linear", &[1.0], 1).unwrap();
        let v = check_margin(&id, &dom, 1.0, 10_000, 1).unwrap();
        assert!(!v.satisfied);
        let ctx = GridContext::origin(1.0, 1).unwrap();
        assert!(v.witness.unwrap().recheck(&id, &dom, &ctx));
        assert_eq!(check_margin_exact(&id, &dom, 1.0).unwrap(), Some(false));

        assert!(matches!(check_margin(&f, &dom, 5.0, 100, 1), Err(Error::Config(_))));
        let simplex = DomainSpec::cube(0.0, 4.0, 2)
            .unwrap()
            .with_membership(crate::lattice::Membership::Simplex);
        let g = builtin_map("scalar-linear", &[0.25], 2).unwrap();
        assert!(matches!(check_margin(&g, &simplex, 1.0, 100, 1), Err(Error::Config(_))));
    }

    #[test]
    fn affine_image_box_is_exact_on_corners() {
        let f = MapSpec::affine(vec![0.5, -0.25, 0.125, 0.25], vec![0.1, -0.2]).unwrap();
        let dom = DomainSpec::new_box(vec![-1.0, 0.0], vec![2.0, 3.0]).unwrap();
        let (lo, hi) = f.image_box(&dom).unwrap();
        let mut want_lo = [f64::INFINITY; 2];
        let mut want_hi = [f64::NEG_INFINITY; 2];
        for x in [-1.0, 2.0] {
            for y in [0.0, 3.0] {
                let v = f.eval(&[x, y]);
                for i in 0..2 {
                    want_lo[i] = want_lo[i].min(v[i]);
                    want_hi[i] = want_hi[i].max(v[i]);
                }
            }
        }
        for i in 0..2 {
            assert!((lo[i] - want_lo[i]).abs() < 1e-12);
            assert!((hi[i] - want_hi[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn reflection_adapter() {
        // monotone for the order that reverses the second axis
        let f = MapSpec::affine(vec![0.25, -0.125, -0.125, 0.25], vec![0.0, 0.0]).unwrap();
        assert!(!f.declared_monotone());
        let g = f.conjugate_by_reflection(&[false, true]).unwrap();
        assert!(g.declared_monotone());
        assert_eq!(g.eval(&[1.0, 2.0]), vec![0.5, 0.625]);

        let dom = DomainSpec::cube(-2.0, 2.0, 2).unwrap();
        let ctx = GridContext::origin(1.0, 2).unwrap();
        let pts = enumerate_domain(&dom, &ctx).unwrap();
        assert!(!check_monotone_on_lattice(&f, &pts, &ctx).satisfied);
        assert!(check_monotone_on_lattice(&g, &pts, &ctx).satisfied);

        // generic path agrees with the affine closed form
        let s = MapSpec::custom("f", 2, false, move |x, out| f.eval_into(x, out));
        let h = s.conjugate_by_reflection(&[false, true]).unwrap();
        assert_eq!(h.eval(&[1.0, 2.0]), vec![0.5, 0.625]);
        assert!(check_monotone_on_lattice(&h, &pts, &ctx).satisfied);
    }
}
