//! Uniform lattices `{q + h z}`, the roundoff operator onto them, and compact
//! domains with their lattice enumeration.
//!
//! Lattice points are always carried as integer index vectors. Real
//! coordinates are derived on demand through [`GridContext::point`], so
//! equality between lattice points never involves floating-point comparison.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Default upper limit on the number of candidate points an enumeration may
/// visit.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// Relative distance to an integer below which `l_i / h` is treated as an
/// exact multiple when computing the per-axis capacity.
pub const EXACT_MULTIPLE_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

/// Scalar roundoff `[y]_h = k h` where `(k - 1/2) h <= y < (k + 1/2) h`.
///
/// ```
/// use latlab_core::lattice::scalar_round;
/// assert_eq!(scalar_round(0.5, 1.0).unwrap(), 1.0);
/// assert_eq!(scalar_round(-0.5, 1.0).unwrap(), 0.0);
/// ```
pub fn scalar_round(y: f64, h: f64) -> Result<f64> {
    check_spacing(h)?;
    if !y.is_finite() {
        return Err(Error::Argument(format!("value {y} is not finite")));
    }
    Ok(cell_index(y, h) as f64 * h)
}

/// Index `k` of the half-open cell `[(k - 1/2) h, (k + 1/2) h)` containing `y`.
#[inline]
pub(crate) fn cell_index(y: f64, h: f64) -> i64 {
    libm::floor(y / h + 0.5) as i64
}

fn check_spacing(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("lattice spacing {h} must be positive and finite")))
    }
}

/// The spacing `h` and offset `q` fixing the lattice `L_{h,q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridContext {
    h: f64,
    q: Vec<f64>,
}

impl GridContext {
    /// Builds a context, requiring `q` to lie in the offset cube
    /// `-h/2 < q_i <= h/2`.
    pub fn new(h: f64, q: Vec<f64>) -> Result<Self> {
        check_spacing(h)?;
        if q.is_empty() {
            return Err(Error::Argument("offset must have at least one coordinate".into()));
        }
        for (i, &qi) in q.iter().enumerate() {
            if !qi.is_finite() || qi <= -h / 2.0 || qi > h / 2.0 {
                return Err(Error::Argument(format!(
                    "offset coordinate q_{} = {qi} outside (-h/2, h/2] for h = {h}",
                    i + 1
                )));
            }
        }
        Ok(Self { h, q })
    }

    /// Builds the context for the lattice through `offset`, reducing each
    /// coordinate into `(-h/2, h/2]`. The resulting lattice is the same set of
    /// points; only the index origin moves.
    pub fn from_offset(h: f64, offset: &[f64]) -> Result<Self> {
        check_spacing(h)?;
        let q = offset
            .iter()
            .map(|&o| {
                if !o.is_finite() {
                    return Err(Error::Argument(format!("offset {o} is not finite")));
                }
                let shift = libm::ceil(o / h - 0.5);
                let mut r = o - shift * h;
                // ceil can land one cell off when o/h - 1/2 rounds across an integer
                if r <= -h / 2.0 {
                    r += h;
                } else if r > h / 2.0 {
                    r -= h;
                }
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h, q)
    }

    /// The zero-offset lattice `h Z^d`.
    pub fn origin(h: f64, dimension: usize) -> Result<Self> {
        Self::new(h, vec![0.0; dimension])
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn dimension(&self) -> usize {
        self.q.len()
    }

    /// Real coordinates `q + h z` of a lattice index.
    pub fn point(&self, z: &LatticeIndex) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.point_into(z, &mut out);
        out
    }

    pub(crate) fn point_into(&self, z: &LatticeIndex, out: &mut [f64]) {
        for ((o, &qi), &zi) in out.iter_mut().zip(&self.q).zip(z.as_slice()) {
            *o = qi + self.h * zi as f64;
        }
    }

    /// Roundoff operator `[x]_{h,q}`; see [`round_to_lattice`].
    pub fn round(&self, x: &[f64]) -> Result<LatticeIndex> {
        round_to_lattice(x, self)
    }
}

/// Integer coordinates `z` of the lattice point `q + h z`.
///
/// The derived ordering is lexicographic and is used for enumeration order
/// and lookups. The componentwise partial order is [`LatticeIndex::le`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeIndex(Vec<i64>);

impl LatticeIndex {
    pub fn new(z: Vec<i64>) -> Self {
        Self(z)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self >= other`.
    pub fn ge(&self, other: &Self) -> bool {
        other.le(self)
    }

    /// True when the two indices are ordered one way or the other.
    pub fn comparable(&self, other: &Self) -> bool {
        self.le(other) || other.le(self)
    }
}

impl From<Vec<i64>> for LatticeIndex {
    fn from(z: Vec<i64>) -> Self {
        Self(z)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, z) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{z}")?;
        }
        f.write_str(")")
    }
}

/// Roundoff of `x` onto `L_{h,q}`: coordinate `i` of the result is
/// `floor((x_i - q_i)/h + 1/2)`.
pub fn round_to_lattice(x: &[f64], ctx: &GridContext) -> Result<LatticeIndex> {
    if x.len() != ctx.dimension() {
        return Err(Error::Argument(format!(
            "point has {} coordinates, lattice has dimension {}",
            x.len(),
            ctx.dimension()
        )));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::Argument(format!("coordinate {bad} is not finite")));
    }
    Ok(round_unchecked(x, ctx))
}

#[inline]
pub(crate) fn round_unchecked(x: &[f64], ctx: &GridContext) -> LatticeIndex {
    LatticeIndex(
        x.iter()
            .zip(ctx.q())
            .map(|(&xi, &qi)| cell_index(xi - qi, ctx.h()))
            .collect(),
    )
}

pub type MembershipFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// Restriction of a box to a general compact subset.
///
/// The named shapes are defined relative to the enclosing box `[a, b]`.
#[derive(Clone)]
pub enum Membership {
    /// `sum_i (x_i - a_i) / (b_i - a_i) <= 1`: the corner simplex at `a`.
    Simplex,
    /// The ellipsoid inscribed in the box.
    Ball,
    /// The box minus the open upper orthant at its midpoint:
    /// excluded points have `x_i > (a_i + b_i)/2` for every `i`.
    LShape,
    /// Arbitrary closed set; must return false outside the box.
    Custom { name: String, contains: Arc<MembershipFn> },
}

impl Membership {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "simplex" => Ok(Self::Simplex),
            "ball" => Ok(Self::Ball),
            "l-shape" | "lshape" | "L-shape" => Ok(Self::LShape),
            other => Err(Error::Config(format!("unknown domain predicate `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Simplex => "simplex",
            Self::Ball => "ball",
            Self::LShape => "l-shape",
            Self::Custom { name, .. } => name,
        }
    }

    fn contains(&self, lower: &[f64], upper: &[f64], x: &[f64]) -> bool {
        match self {
            Self::Simplex => {
                let mut total = 0.0;
                for ((&xi, &a), &b) in x.iter().zip(lower).zip(upper) {
                    let w = b - a;
                    if w > 0.0 {
                        total += (xi - a) / w;
                    }
                }
                total <= 1.0
            }
            Self::Ball => {
                let mut total = 0.0;
                for ((&xi, &a), &b) in x.iter().zip(lower).zip(upper) {
                    let r = (b - a) / 2.0;
                    if r > 0.0 {
                        let t = (xi - (a + b) / 2.0) / r;
                        total += t * t;
                    }
                }
                total <= 1.0
            }
            Self::LShape => !x
                .iter()
                .zip(lower)
                .zip(upper)
                .all(|((&xi, &a), &b)| xi > (a + b) / 2.0),
            Self::Custom { contains, .. } => contains(x),
        }
    }
}

impl fmt::Debug for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Membership({})", self.name())
    }
}

/// Compact domain: a closed box, optionally restricted by a membership
/// predicate.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    membership: Option<Membership>,
}

impl DomainSpec {
    /// Closed box `[lower, upper]`.
    pub fn new_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Argument(format!(
                "box corners must be nonempty and of equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::Argument(format!(
                    "axis {}: need finite lower <= upper, got [{a}, {b}]",
                    i + 1
                )));
            }
        }
        Ok(Self { lower, upper, membership: None })
    }

    /// Cube `[lo, hi]^d`.
    pub fn cube(lo: f64, hi: f64, dimension: usize) -> Result<Self> {
        Self::new_box(vec![lo; dimension], vec![hi; dimension])
    }

    pub fn with_membership(mut self, membership: Membership) -> Self {
        self.membership = Some(membership);
        self
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn membership(&self) -> Option<&Membership> {
        self.membership.as_ref()
    }

    pub fn is_box(&self) -> bool {
        self.membership.is_none()
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    /// Lebesgue measure of the bounding box.
    pub fn box_volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }

    pub fn in_box(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&xi, &a), &b)| a <= xi && xi <= b)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.in_box(x)
            && self
                .membership
                .as_ref()
                .is_none_or(|m| m.contains(&self.lower, &self.upper, x))
    }
}

/// Lattice points of `dom` under `ctx`, in lexicographic index order.
pub fn enumerate_domain(dom: &DomainSpec, ctx: &GridContext) -> Result<Vec<LatticeIndex>> {
    enumerate_domain_capped(dom, ctx, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_domain_capped(
    dom: &DomainSpec,
    ctx: &GridContext,
    cap: usize,
) -> Result<Vec<LatticeIndex>> {
    let d = ctx.dimension();
    if dom.dimension() != d {
        return Err(Error::Argument(format!(
            "domain has dimension {}, lattice has dimension {d}",
            dom.dimension()
        )));
    }
    let h = ctx.h();
    // Candidate index ranges padded by one on each side; exact membership is
    // decided on the computed point coordinates below.
    let mut ranges = Vec::with_capacity(d);
    let mut estimate = 1.0f64;
    for i in 0..d {
        let lo = libm::ceil((dom.lower[i] - ctx.q[i]) / h) - 1.0;
        let hi = libm::floor((dom.upper[i] - ctx.q[i]) / h) + 1.0;
        if !(lo.abs() < 4.0e15 && hi.abs() < 4.0e15) {
            return Err(Error::Resource { estimate: f64::INFINITY, cap });
        }
        estimate *= (hi - lo + 1.0).max(0.0);
        ranges.push((lo as i64, hi as i64));
    }
    if estimate > cap as f64 {
        return Err(Error::Resource { estimate, cap });
    }
    let mut out = Vec::new();
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(out);
    }
    let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; d];
    loop {
        for i in 0..d {
            x[i] = ctx.q[i] + h * z[i] as f64;
        }
        if dom.contains(&x) {
            out.push(LatticeIndex(z.clone()));
        }
        // odometer, last axis fastest
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            if z[axis] < ranges[axis].1 {
                z[axis] += 1;
                break;
            }
            z[axis] = ranges[axis].0;
        }
    }
}

/// Which order bound is missing from a point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// Outcome of [`order_bounds`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderBounds {
    /// Members `lower <= z <= upper` for every listed `z`.
    Bounded { lower: LatticeIndex, upper: LatticeIndex },
    /// The componentwise extreme `corner` is not a member, so no member can
    /// bound the set on that side. `witnesses` are members attaining the
    /// extreme value on different axes.
    Unbounded {
        missing: Bound,
        corner: LatticeIndex,
        witnesses: Vec<LatticeIndex>,
    },
}

/// Finds members `u1 <= z <= u2` for all listed `z`, when they exist.
///
/// A member below every point must equal the componentwise minimum, so the
/// test reduces to membership of the two extreme corners.
pub fn order_bounds(points: &[LatticeIndex]) -> Result<OrderBounds> {
    let first = points
        .first()
        .ok_or_else(|| Error::Argument("order bounds of an empty point set".into()))?;
    let d = first.dimension();
    let mut lo = first.0.clone();
    let mut hi = first.0.clone();
    let mut lo_at = vec![0usize; d];
    let mut hi_at = vec![0usize; d];
    for (n, p) in points.iter().enumerate().skip(1) {
        if p.dimension() != d {
            return Err(Error::Argument("points of mixed dimension".into()));
        }
        for i in 0..d {
            if p.0[i] < lo[i] {
                lo[i] = p.0[i];
                lo_at[i] = n;
            }
            if p.0[i] > hi[i] {
                hi[i] = p.0[i];
                hi_at[i] = n;
            }
        }
    }
    let lo = LatticeIndex(lo);
    let hi = LatticeIndex(hi);
    let witnesses = |at: &[usize]| {
        let mut w: Vec<LatticeIndex> = at.iter().map(|&n| points[n].clone()).collect();
        w.sort();
        w.dedup();
        w
    };
    if !points.contains(&lo) {
        return Ok(OrderBounds::Unbounded { missing: Bound::Lower, corner: lo, witnesses: witnesses(&lo_at) });
    }
    if !points.contains(&hi) {
        return Ok(OrderBounds::Unbounded { missing: Bound::Upper, corner: hi, witnesses: witnesses(&hi_at) });
    }
    Ok(OrderBounds::Bounded { lower: lo, upper: hi })
}

/// Per-axis extents `l_i`, capacities `L_i` and their product `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtentReport {
    pub extent: Vec<f64>,
    pub per_axis: Vec<u64>,
    pub total: u64,
}

/// Extents of the bounding box of `dom` and the capacities
/// `L_i = floor(l_i / h) + 1`, with `l_i / h` snapped to an integer when it
/// is within [`EXACT_MULTIPLE_TOLERANCE`] relative distance of one.
///
/// For predicate domains the bounding box is used, which can only enlarge
/// `L`.
pub fn compute_extent(dom: &DomainSpec, h: f64) -> Result<ExtentReport> {
    check_spacing(h)?;
    let extent: Vec<f64> = dom.lower.iter().zip(&dom.upper).map(|(a, b)| b - a).collect();
    let per_axis: Vec<u64> = extent.iter().map(|&l| axis_capacity(l, h)).collect();
    let total = per_axis.iter().fold(1u64, |acc, &c| acc.saturating_mul(c));
    Ok(ExtentReport { extent, per_axis, total })
}

fn axis_capacity(l: f64, h: f64) -> u64 {
    let ratio = l / h;
    let nearest = libm::round(ratio);
    let r = if (ratio - nearest).abs() <= EXACT_MULTIPLE_TOLERANCE * nearest.max(1.0) {
        nearest
    } else {
        libm::floor(ratio)
    };
    r as u64 + 1
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        })
    }
}

impl fmt::Display for OrderBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderBounds::Bounded { lower, upper } => write!(f, "bounded by {lower} and {upper}"),
            OrderBounds::Unbounded { missing, corner, .. } => {
                write!(f, "no {missing} bound: corner {corner} is not a member")
            }
        }
    }
}
