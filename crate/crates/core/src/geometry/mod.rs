//! Bounded shapes, their volumes and covariograms `g_E(h) = V(E ∩ (E + h))`.
//!
//! Perimeter code works with the deficit `V(E) - g_E(h)`, which every exact
//! variant evaluates without cancellation so that offsets down to `1e-300`
//! keep full relative accuracy.

mod ball;
mod boxes;
mod lattice;

use std::fmt;
use std::sync::Arc;

pub use boxes::AxisBox;
pub(crate) use boxes::{boxes_cover, disjoint_union, merge_cells};
pub use lattice::{LatticeSet, OffsetTable};
pub(crate) use lattice::strides_of;

use crate::constants::{sphere_area, unit_ball_volume};
use crate::error::{invalid, unsupported, Result};
use crate::estimate::Estimate;
use crate::numerics::{mc_mean, McSpec};

/// Box unions with more boxes than this use the lattice table when one is attached.
const LATTICE_MIN_BOXES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn center(&self) -> &[f64] {
        &self.center
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// Union of boxes with pairwise disjoint interiors, optionally backed by a
/// lattice when the boxes are merged grid cells.
#[derive(Debug, Clone)]
pub struct BoxUnion {
    boxes: Vec<AxisBox>,
    lattice: Option<LatticeSet>,
}

impl BoxUnion {
    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn lattice(&self) -> Option<&LatticeSet> {
        self.lattice.as_ref()
    }

    /// Whether deficits come from the lattice table rather than box pairs.
    pub(crate) fn prefers_lattice(&self) -> bool {
        self.lattice.is_some() && self.boxes.len() > LATTICE_MIN_BOXES
    }

    fn lattice_table(&self) -> Option<&OffsetTable> {
        match &self.lattice {
            Some(l) if self.prefers_lattice() => Some(l.deficit_table()),
            _ => None,
        }
    }

    fn volume(&self) -> f64 {
        self.boxes.iter().map(AxisBox::volume).sum()
    }

    fn deficit(&self, h: &[f64]) -> f64 {
        if let Some(t) = self.lattice_table() {
            return t.interpolate(h);
        }
        let mut diag = 0.0;
        let mut cross = 0.0;
        for (i, bi) in self.boxes.iter().enumerate() {
            diag += bi.self_deficit(h);
            for (j, bj) in self.boxes.iter().enumerate() {
                if i != j {
                    cross += bi.overlap_shifted(bj, h);
                }
            }
        }
        (diag - cross).max(0.0)
    }

    fn covariogram(&self, h: &[f64]) -> f64 {
        if let Some(t) = self.lattice_table() {
            return (t.outside() - t.interpolate(h)).max(0.0);
        }
        let mut g = 0.0;
        for bi in &self.boxes {
            for bj in &self.boxes {
                g += bi.overlap_shifted(bj, h);
            }
        }
        g
    }

    fn kinks(&self, axis: usize) -> Vec<f64> {
        if let Some(t) = self.lattice_table() {
            return t.kinks(axis);
        }
        let mut c = Vec::new();
        for bi in &self.boxes {
            for bj in &self.boxes {
                for x in [bi.lo()[axis], bi.hi()[axis]] {
                    for y in [bj.lo()[axis], bj.hi()[axis]] {
                        c.push((x - y).abs());
                    }
                }
            }
        }
        sort_dedup(&mut c);
        c
    }
}

pub type MembershipOracle = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A set given only by a membership test inside a bounding box.
#[derive(Clone)]
pub struct IndicatorSet {
    oracle: MembershipOracle,
    bbox: AxisBox,
    volume_hint: Option<f64>,
    label: String,
}

impl IndicatorSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        self.bbox.contains_point(x) && (self.oracle)(x)
    }
    pub fn bbox(&self) -> &AxisBox {
        &self.bbox
    }
    pub fn volume_hint(&self) -> Option<f64> {
        self.volume_hint
    }
    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for IndicatorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IndicatorSet")
            .field("label", &self.label)
            .field("bbox", &self.bbox)
            .field("volume_hint", &self.volume_hint)
            .finish()
    }
}

/// A bounded set of positive volume.
#[derive(Debug, Clone)]
pub enum Shape {
    Interval(Interval),
    Ball(Ball),
    Box(AxisBox),
    BoxUnion(BoxUnion),
    Indicator(IndicatorSet),
}

fn sort_dedup(c: &mut Vec<f64>) {
    c.sort_by(f64::total_cmp);
    c.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()));
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        invalid(format!("{what} must be finite"))
    }
}

impl Shape {
    pub fn interval(a: f64, b: f64) -> Result<Shape> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return invalid(format!("interval needs a < b, got ({a}, {b})"));
        }
        Ok(Shape::Interval(Interval { a, b }))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Shape> {
        if center.is_empty() || center.len() > crate::constants::MAX_DIM {
            return invalid(format!("ball dimension {} unsupported", center.len()));
        }
        check_finite(&center, "ball center")?;
        if !(radius > 0.0 && radius.is_finite()) {
            return invalid(format!("ball radius must be positive, got {radius}"));
        }
        Ok(Shape::Ball(Ball { center, radius }))
    }

    pub fn unit_ball(n: usize) -> Result<Shape> {
        Shape::ball(vec![0.0; n], 1.0)
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Shape> {
        Ok(Shape::Box(AxisBox::new(lo, hi)?))
    }

    /// Checks that the boxes share a dimension and have disjoint interiors.
    pub fn box_union(boxes: Vec<AxisBox>) -> Result<Shape> {
        if boxes.is_empty() {
            return invalid("box union needs at least one box");
        }
        let n = boxes[0].dim();
        if boxes.iter().any(|b| b.dim() != n) {
            return invalid("box union mixes dimensions");
        }
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                if boxes[i].interiors_overlap(&boxes[j]) {
                    return invalid(format!("boxes {i} and {j} overlap"));
                }
            }
        }
        Ok(Shape::BoxUnion(BoxUnion { boxes, lattice: None }))
    }

    /// Union of lattice cells; `boxes` must be the merged cells of `lattice`.
    pub(crate) fn lattice_union(boxes: Vec<AxisBox>, lattice: LatticeSet) -> Shape {
        Shape::BoxUnion(BoxUnion { boxes, lattice: Some(lattice) })
    }

    pub fn indicator(
        oracle: MembershipOracle,
        bbox: AxisBox,
        volume_hint: Option<f64>,
        label: impl Into<String>,
    ) -> Result<Shape> {
        if let Some(v) = volume_hint {
            if !(v > 0.0 && v <= bbox.volume() * (1.0 + 1e-12)) {
                return invalid(format!("volume hint {v} outside (0, bbox volume]"));
            }
        }
        Ok(Shape::Indicator(IndicatorSet { oracle, bbox, volume_hint, label: label.into() }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Interval(_) => 1,
            Shape::Ball(b) => b.dim(),
            Shape::Box(b) => b.dim(),
            Shape::BoxUnion(u) => u.boxes[0].dim(),
            Shape::Indicator(s) => s.bbox.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Shape::Interval(_) => "interval",
            Shape::Ball(_) => "ball",
            Shape::Box(_) => "box",
            Shape::BoxUnion(_) => "boxunion",
            Shape::Indicator(_) => "indicator",
        }
    }

    /// Exact volume, when the variant has one.
    pub fn exact_volume(&self) -> Option<f64> {
        match self {
            Shape::Interval(i) => Some(i.length()),
            Shape::Ball(b) => Some(unit_ball_volume(b.dim()) * b.radius.powi(b.dim() as i32)),
            Shape::Box(b) => Some(b.volume()),
            Shape::BoxUnion(u) => Some(u.volume()),
            Shape::Indicator(s) => s.volume_hint,
        }
    }

    pub fn volume(&self) -> Estimate {
        self.volume_with(&McSpec::default()).expect("default MC spec is valid")
    }

    pub fn volume_with(&self, mc: &McSpec) -> Result<Estimate> {
        if let Some(v) = self.exact_volume() {
            return Ok(Estimate::exact(v));
        }
        let Shape::Indicator(s) = self else { unreachable!("only indicator sets lack exact volume") };
        let bbox = &s.bbox;
        let bv = bbox.volume();
        let n = bbox.dim();
        let est = mc_mean(mc, |st| {
            let mut x = [0.0; 16];
            for i in 0..n {
                x[i] = st.uniform_in(bbox.lo()[i], bbox.hi()[i]);
            }
            if (s.oracle)(&x[..n]) {
                bv
            } else {
                0.0
            }
        })?;
        Ok(est)
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            Shape::Interval(i) => AxisBox::new_unchecked(vec![i.a], vec![i.b]),
            Shape::Ball(b) => AxisBox::new_unchecked(
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            Shape::Box(b) => b.clone(),
            Shape::BoxUnion(u) => u.boxes.iter().skip(1).fold(u.boxes[0].clone(), |acc, b| acc.hull(b)),
            Shape::Indicator(s) => s.bbox.clone(),
        }
    }

    /// Diameter of the bounding box; the covariogram vanishes beyond it.
    pub fn diameter(&self) -> f64 {
        match self {
            Shape::Ball(b) => 2.0 * b.radius,
            _ => self.bounding_box().diameter(),
        }
    }

    /// Volume-weighted centroid (bounding-box centre for indicator sets).
    pub fn centroid(&self) -> Vec<f64> {
        match self {
            Shape::Interval(i) => vec![0.5 * (i.a + i.b)],
            Shape::Ball(b) => b.center.clone(),
            Shape::Box(b) => b.center(),
            Shape::BoxUnion(u) => {
                let n = u.boxes[0].dim();
                let v = u.volume();
                let mut c = vec![0.0; n];
                for b in &u.boxes {
                    let w = b.volume() / v;
                    for (ci, bi) in c.iter_mut().zip(b.center()) {
                        *ci += w * bi;
                    }
                }
                c
            }
            Shape::Indicator(s) => s.bbox.center(),
        }
    }

    fn check_offset(&self, h: &[f64]) -> Result<()> {
        if h.len() != self.dim() {
            return invalid(format!("offset has dimension {} but shape has {}", h.len(), self.dim()));
        }
        check_finite(h, "offset")
    }

    /// Covariogram with the default Monte Carlo spec for indicator sets.
    pub fn covariogram(&self, h: &[f64]) -> Result<Estimate> {
        self.covariogram_with(h, &McSpec::default())
    }

    pub fn covariogram_with(&self, h: &[f64], mc: &McSpec) -> Result<Estimate> {
        self.check_offset(h)?;
        let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm >= self.diameter() {
            return Ok(Estimate::exact(0.0));
        }
        match self {
            Shape::Interval(i) => Ok(Estimate::exact((i.length() - h[0].abs()).max(0.0))),
            Shape::Ball(b) => Ok(Estimate::exact(ball::lens_volume(b.dim(), b.radius, norm))),
            Shape::Box(b) => Ok(Estimate::exact(b.overlap_shifted(b, h))),
            Shape::BoxUnion(u) => Ok(Estimate::exact(u.covariogram(h))),
            Shape::Indicator(s) => {
                // sample x in bbox ∩ (bbox + h); count x ∈ E and x - h ∈ E
                let n = s.bbox.dim();
                let mut lo = vec![0.0; n];
                let mut hi = vec![0.0; n];
                for i in 0..n {
                    lo[i] = s.bbox.lo()[i].max(s.bbox.lo()[i] + h[i]);
                    hi[i] = s.bbox.hi()[i].min(s.bbox.hi()[i] + h[i]);
                    if hi[i] <= lo[i] {
                        return Ok(Estimate::exact(0.0));
                    }
                }
                let region: f64 = lo.iter().zip(&hi).map(|(l, u)| u - l).product();
                mc_mean(mc, |st| {
                    let mut x = [0.0; 16];
                    let mut y = [0.0; 16];
                    for i in 0..n {
                        x[i] = st.uniform_in(lo[i], hi[i]);
                        y[i] = x[i] - h[i];
                    }
                    if (s.oracle)(&x[..n]) && (s.oracle)(&y[..n]) {
                        region
                    } else {
                        0.0
                    }
                })
            }
        }
    }

    /// `V(E) - g_E(h)` for exact variants, `None` for indicator sets.
    pub(crate) fn deficit(&self, h: &[f64]) -> Option<f64> {
        match self {
            Shape::Interval(i) => Some(h[0].abs().min(i.length())),
            Shape::Ball(b) => {
                let d = h.iter().map(|x| x * x).sum::<f64>().sqrt();
                Some(ball::lens_deficit(b.dim(), b.radius, d))
            }
            Shape::Box(b) => Some(b.self_deficit(h)),
            Shape::BoxUnion(u) => Some(u.deficit(h)),
            Shape::Indicator(_) => None,
        }
    }

    /// Radial deficit for balls: `V - g` at `|h| = d`.
    pub(crate) fn radial_deficit(&self, d: f64) -> Option<f64> {
        match self {
            Shape::Ball(b) => Some(ball::lens_deficit(b.dim(), b.radius, d)),
            _ => None,
        }
    }

    /// Values `c ≥ 0` such that the deficit has kinks on `|h_axis| = c`.
    pub(crate) fn kinks(&self, axis: usize) -> Vec<f64> {
        match self {
            Shape::Interval(i) => vec![0.0, i.length()],
            Shape::Box(b) => vec![0.0, b.lengths()[axis]],
            Shape::BoxUnion(u) => u.kinks(axis),
            _ => Vec::new(),
        }
    }

    /// Radii at which the spherical average of the deficit may lose smoothness.
    pub(crate) fn radial_kinks(&self) -> Vec<f64> {
        let n = self.dim();
        let per_axis: Vec<Vec<f64>> = (0..n).map(|a| self.kinks(a)).collect();
        let mut out: Vec<f64> = per_axis.iter().flatten().copied().collect();
        let small = per_axis.iter().all(|c| c.len() <= 24);
        if small && n >= 2 {
            // norms of kink combinations over every subset of axes
            for mask in 1usize..(1 << n) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let axes: Vec<usize> = (0..n).filter(|a| mask >> a & 1 == 1).collect();
                let mut acc = vec![0.0f64];
                for &a in &axes {
                    let mut next = Vec::with_capacity(acc.len() * per_axis[a].len());
                    for s in &acc {
                        for c in &per_axis[a] {
                            if *c > 0.0 {
                                next.push(s + c * c);
                            }
                        }
                    }
                    acc = next;
                }
                out.extend(acc.into_iter().map(f64::sqrt));
            }
        }
        if let Shape::Ball(b) = self {
            out.push(2.0 * b.radius);
        }
        out.retain(|c| *c > 0.0);
        sort_dedup(&mut out);
        out
    }

    /// `{r x : x ∈ E}` for `r > 0`.
    pub fn scale(&self, r: f64) -> Result<Shape> {
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("scale factor must be positive, got {r}"));
        }
        Ok(match self {
            Shape::Interval(i) => Shape::Interval(Interval { a: i.a * r, b: i.b * r }),
            Shape::Ball(b) => {
                Shape::Ball(Ball { center: b.center.iter().map(|c| c * r).collect(), radius: b.radius * r })
            }
            Shape::Box(b) => Shape::Box(b.scaled(r)),
            Shape::BoxUnion(u) => Shape::BoxUnion(BoxUnion {
                boxes: u.boxes.iter().map(|b| b.scaled(r)).collect(),
                lattice: u.lattice.as_ref().map(|l| l.scaled(r)),
            }),
            Shape::Indicator(s) => {
                let inner = Arc::clone(&s.oracle);
                let n = s.bbox.dim();
                let oracle: MembershipOracle = Arc::new(move |x: &[f64]| {
                    let mut y = [0.0; 16];
                    for i in 0..n {
                        y[i] = x[i] / r;
                    }
                    inner(&y[..n])
                });
                Shape::Indicator(IndicatorSet {
                    oracle,
                    bbox: s.bbox.scaled(r),
                    volume_hint: s.volume_hint.map(|v| v * r.powi(n as i32)),
                    label: format!("{}*{}", s.label, r),
                })
            }
        })
    }

    pub fn translate(&self, v: &[f64]) -> Result<Shape> {
        self.check_offset(v)?;
        Ok(match self {
            Shape::Interval(i) => Shape::Interval(Interval { a: i.a + v[0], b: i.b + v[0] }),
            Shape::Ball(b) => Shape::Ball(Ball {
                center: b.center.iter().zip(v).map(|(c, d)| c + d).collect(),
                radius: b.radius,
            }),
            Shape::Box(b) => Shape::Box(b.translated(v)),
            Shape::BoxUnion(u) => Shape::BoxUnion(BoxUnion {
                boxes: u.boxes.iter().map(|b| b.translated(v)).collect(),
                lattice: u.lattice.as_ref().map(|l| l.translated(v)),
            }),
            Shape::Indicator(s) => {
                let inner = Arc::clone(&s.oracle);
                let shift = v.to_vec();
                let n = shift.len();
                let oracle: MembershipOracle = Arc::new(move |x: &[f64]| {
                    let mut y = [0.0; 16];
                    for i in 0..n {
                        y[i] = x[i] - shift[i];
                    }
                    inner(&y[..n])
                });
                Shape::Indicator(IndicatorSet {
                    oracle,
                    bbox: s.bbox.translated(v),
                    volume_hint: s.volume_hint,
                    label: format!("{}+shift", s.label),
                })
            }
        })
    }

    /// Dilation by `factor` about the centroid.
    pub fn dilate(&self, factor: f64) -> Result<Shape> {
        let c = self.centroid();
        let neg: Vec<f64> = c.iter().map(|x| -x).collect();
        self.translate(&neg)?.scale(factor)?.translate(&c)
    }

    /// Classical perimeter; `2` for intervals (two endpoints).
    pub fn classical_perimeter(&self) -> Result<f64> {
        match self {
            Shape::Interval(_) => Ok(2.0),
            Shape::Ball(b) => Ok(sphere_area(b.dim()) * b.radius.powi(b.dim() as i32 - 1)),
            Shape::Box(b) => Ok(b.surface_area()),
            Shape::BoxUnion(u) => {
                let n = u.boxes[0].dim();
                let mut total: f64 = u.boxes.iter().map(AxisBox::surface_area).sum();
                // faces shared by touching boxes are interior
                for (i, bi) in u.boxes.iter().enumerate() {
                    for bj in &u.boxes[i + 1..] {
                        for axis in 0..n {
                            let touch = bi.hi()[axis] == bj.lo()[axis] || bj.hi()[axis] == bi.lo()[axis];
                            if !touch {
                                continue;
                            }
                            let mut area = 1.0;
                            for k in (0..n).filter(|k| *k != axis) {
                                area *= (bi.hi()[k].min(bj.hi()[k]) - bi.lo()[k].max(bj.lo()[k])).max(0.0);
                            }
                            if n == 1 {
                                area = 1.0;
                            }
                            total -= 2.0 * area;
                        }
                    }
                }
                Ok(total)
            }
            Shape::Indicator(_) => unsupported("classical perimeter of an indicator set"),
        }
    }

    /// Euclidean distance from `x` to the closure of the shape.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        self.check_offset(x)?;
        match self {
            Shape::Interval(i) => Ok((i.a - x[0]).max(x[0] - i.b).max(0.0)),
            Shape::Ball(b) => {
                let d = b.center.iter().zip(x).map(|(c, y)| (c - y).powi(2)).sum::<f64>().sqrt();
                Ok((d - b.radius).max(0.0))
            }
            Shape::Box(b) => Ok(b.distance(x)),
            Shape::BoxUnion(u) => Ok(u.boxes.iter().map(|b| b.distance(x)).fold(f64::INFINITY, f64::min)),
            Shape::Indicator(_) => unsupported("distance to an indicator set"),
        }
    }

    /// Membership in the closure (exact variants) or the oracle.
    pub fn contains_point(&self, x: &[f64]) -> bool {
        match self {
            Shape::Indicator(s) => s.contains(x),
            _ => self.distance(x).map(|d| d == 0.0).unwrap_or(false),
        }
    }

    /// The shape as a list of boxes, when it is box-like.
    pub fn as_boxes(&self) -> Option<Vec<AxisBox>> {
        match self {
            Shape::Interval(i) => Some(vec![AxisBox::new_unchecked(vec![i.a], vec![i.b])]),
            Shape::Box(b) => Some(vec![b.clone()]),
            Shape::BoxUnion(u) => Some(u.boxes.clone()),
            _ => None,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Shape::Interval(_) | Shape::Ball(_) | Shape::Box(_) => true,
            Shape::BoxUnion(u) => {
                let hull = self.bounding_box();
                (hull.volume() - u.volume()).abs() <= 1e-12 * hull.volume()
            }
            Shape::Indicator(_) => false,
        }
    }

    /// `other ⊆ self`, for exact variants.
    pub fn contains(&self, other: &Shape) -> Result<bool> {
        if self.dim() != other.dim() {
            return invalid("containment test across dimensions");
        }
        if matches!(self, Shape::Indicator(_)) || matches!(other, Shape::Indicator(_)) {
            return unsupported("containment test with an indicator set");
        }
        let tol = 1e-12 * self.diameter().max(other.diameter());
        match (self, other) {
            (Shape::Ball(a), Shape::Ball(b)) => {
                let d = a.center.iter().zip(&b.center).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                Ok(d + b.radius <= a.radius + tol)
            }
            (Shape::Ball(a), _) => {
                // convex: enough to test the corners of every box
                let boxes = other.as_boxes().expect("box-like");
                let n = a.dim();
                for b in &boxes {
                    for corner in 0..(1usize << n) {
                        let d2: f64 = (0..n)
                            .map(|i| {
                                let x = if corner >> i & 1 == 1 { b.hi()[i] } else { b.lo()[i] };
                                (x - a.center[i]).powi(2)
                            })
                            .sum();
                        if d2.sqrt() > a.radius + tol {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            (_, Shape::Ball(_)) => {
                // sufficient test: the ball's bounding box is covered
                let cover = self.as_boxes().expect("box-like");
                Ok(boxes_cover(&cover, &other.bounding_box()))
            }
            _ => {
                let cover = self.as_boxes().expect("box-like");
                let targets = other.as_boxes().expect("box-like");
                Ok(targets.iter().all(|t| boxes_cover(&cover, t)))
            }
        }
    }

    /// Compact textual description in the shape DSL where possible.
    pub fn describe(&self) -> String {
        fn list(v: &[f64]) -> String {
            v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
        }
        match self {
            Shape::Interval(i) => format!("interval:a={},b={}", i.a, i.b),
            Shape::Ball(b) => format!("ball:n={},r={},c={}", b.dim(), b.radius, list(&b.center)),
            Shape::Box(b) => format!("box:lo={};hi={}", list(b.lo()), list(b.hi())),
            Shape::BoxUnion(u) if u.boxes.len() <= 8 => format!(
                "boxunion:{}",
                u.boxes.iter().map(|b| format!("lo={};hi={}", list(b.lo()), list(b.hi()))).collect::<Vec<_>>().join("|")
            ),
            Shape::BoxUnion(u) => format!("boxunion[{} boxes]", u.boxes.len()),
            Shape::Indicator(s) => format!("indicator:{}", s.label),
        }
    }
}

/// Centred disk (or ball) of the given radius as a membership oracle.
pub fn disk_oracle(radius: f64) -> MembershipOracle {
    Arc::new(move |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() <= radius * radius)
}
