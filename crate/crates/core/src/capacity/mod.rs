//! Two-sided enclosures of the fractional capacity `cap(K; Λ̇_α^{1,1})`.
//!
//! The capacity equals `2 inf P_α(O)` over smooth open `O ⊇ K`. Any concrete
//! family of containing sets therefore gives an upper bound, and the
//! isocapacitary inequality `V(K)^{(n-α)/n} ≤ κ_{n,α} cap(K)` gives a lower one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{sphere_area, tau, AlphaContext};
use crate::error::{invalid, unsupported, Error, Result};
use crate::estimate::Estimate;
use crate::geometry::{disjoint_union, AxisBox, Shape};
use crate::numerics::{LimitEnd, LimitScanResult};
use crate::perimeter::{frac_perimeter, sharp_constant, PerimeterSpec};

/// Containing sets searched for the upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `K` dilated by `1 + s` about its centroid.
    #[default]
    Dilates,
    /// `{x : dist(x, K) < s}`; box-like sets use the `ℓ^∞` neighbourhood,
    /// which is again a box union and contains the Euclidean one.
    Neighborhoods,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Dilates => "dilates",
            Family::Neighborhoods => "neighborhoods",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dilates" => Ok(Family::Dilates),
            "neighborhoods" | "neighbourhoods" => Ok(Family::Neighborhoods),
            other => invalid(format!("unknown family '{other}' (dilates, neighborhoods)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitySearch {
    pub family: Family,
    /// Largest family parameter searched.
    pub s_max: f64,
    /// Golden-section steps for dilates, ladder length for neighbourhoods.
    /// With `0` only `s = 0` (the set itself) is evaluated.
    pub iterations: usize,
    pub perimeter: PerimeterSpec,
}

impl Default for CapacitySearch {
    fn default() -> Self {
        CapacitySearch { family: Family::Dilates, s_max: 0.25, iterations: 40, perimeter: PerimeterSpec::default() }
    }
}

impl CapacitySearch {
    pub fn with_family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_perimeter(mut self, perimeter: PerimeterSpec) -> Self {
        self.perimeter = perimeter;
        self
    }

    /// Only the set itself, the limit point of either family.
    pub fn at_zero(perimeter: PerimeterSpec) -> Self {
        CapacitySearch { iterations: 0, perimeter, ..Default::default() }
    }
}

/// Upper bound together with the family member attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub estimate: Estimate,
    pub parameter: f64,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBracket {
    pub lower: Estimate,
    pub upper: Estimate,
    pub witness: String,
    pub n: usize,
    pub alpha: f64,
}

impl CapacityBracket {
    /// `(upper - lower) / upper`.
    pub fn gap(&self) -> f64 {
        (self.upper.value - self.lower.value) / self.upper.value
    }
}

fn check_shape(k: &Shape, ctx: &AlphaContext) -> Result<f64> {
    if k.dim() != ctx.n() {
        return invalid(format!("shape has dimension {} but context has n = {}", k.dim(), ctx.n()));
    }
    if matches!(k, Shape::Indicator(_)) {
        return unsupported("capacity of a membership-only set");
    }
    match k.exact_volume() {
        Some(v) if v > 0.0 => Ok(v),
        _ => invalid("capacity needs a set of positive volume"),
    }
}

/// `{x : dist(x, K) < s}`, or its `ℓ^∞` version for box-like `K`.
pub fn neighborhood(k: &Shape, s: f64) -> Result<Shape> {
    if !(s >= 0.0 && s.is_finite()) {
        return invalid(format!("neighbourhood width must be non-negative, got {s}"));
    }
    if s == 0.0 {
        return Ok(k.clone());
    }
    match k {
        Shape::Interval(i) => Shape::interval(i.a() - s, i.b() + s),
        Shape::Ball(b) => Shape::ball(b.center().to_vec(), b.radius() + s),
        Shape::Box(b) => Ok(Shape::Box(b.expanded(s))),
        Shape::BoxUnion(u) => {
            let grown: Vec<AxisBox> = u.boxes().iter().map(|b| b.expanded(s)).collect();
            let mut parts = disjoint_union(&grown);
            if parts.len() == 1 {
                Ok(Shape::Box(parts.pop().unwrap()))
            } else {
                Shape::box_union(parts)
            }
        }
        Shape::Indicator(_) => unsupported("neighbourhood of a membership-only set"),
    }
}

fn member(k: &Shape, family: Family, s: f64) -> Result<Shape> {
    match family {
        Family::Dilates => k.dilate(1.0 + s),
        Family::Neighborhoods => neighborhood(k, s),
    }
}

/// `2 P_α` of one family member, or `None` when it fails to contain `K`.
fn evaluate(k: &Shape, ctx: &AlphaContext, search: &CapacitySearch, s: f64) -> Result<Option<Estimate>> {
    let o = member(k, search.family, s)?;
    if s > 0.0 && !o.contains(k)? {
        return Ok(None);
    }
    match frac_perimeter(&o, ctx, &search.perimeter) {
        Ok(p) => Ok(Some(p.scaled(2.0))),
        // a competitor short of the tolerance still bounds, with its wider error
        Err(Error::ConvergenceFailure { best, .. }) if s > 0.0 => Ok(Some(best.scaled(2.0))),
        Err(e) => Err(e),
    }
}

/// Upper bound `2 min P_α(O)` over the chosen family, with its witness.
pub fn capacity_upper_witnessed(k: &Shape, ctx: &AlphaContext, search: &CapacitySearch) -> Result<UpperBound> {
    check_shape(k, ctx)?;
    if !(search.s_max > 0.0 && search.s_max.is_finite()) {
        return invalid("family range s_max must be positive");
    }
    let mut best_s = 0.0;
    let mut best = evaluate(k, ctx, search, 0.0)?.expect("K contains itself");
    let mut consider = |s: f64, e: Option<Estimate>| -> f64 {
        match e {
            Some(e) => {
                if e.value < best.value {
                    best = e;
                    best_s = s;
                }
                e.value
            }
            None => f64::INFINITY,
        }
    };
    if search.iterations > 0 {
        match search.family {
            Family::Dilates => {
                let g = 0.5 * (5f64.sqrt() - 1.0);
                let (mut a, mut b) = (0.0, search.s_max);
                let mut c = b - g * (b - a);
                let mut d = a + g * (b - a);
                let mut fc = consider(c, evaluate(k, ctx, search, c)?);
                let mut fd = consider(d, evaluate(k, ctx, search, d)?);
                for _ in 0..search.iterations {
                    if fc <= fd {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - g * (b - a);
                        fc = consider(c, evaluate(k, ctx, search, c)?);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + g * (b - a);
                        fd = consider(d, evaluate(k, ctx, search, d)?);
                    }
                }
            }
            Family::Neighborhoods => {
                let ladder: Vec<f64> =
                    (0..search.iterations.min(16)).map(|j| search.s_max * 0.5f64.powi(j as i32)).collect();
                let values: Vec<Result<Option<Estimate>>> =
                    ladder.par_iter().map(|&s| evaluate(k, ctx, search, s)).collect();
                for (s, v) in ladder.into_iter().zip(values) {
                    consider(s, v?);
                }
            }
        }
    }
    let mut witness = format!("{} s={best_s:e}", search.family.as_str());
    if !k.is_convex() {
        witness.push_str(" (family-restricted)");
    }
    Ok(UpperBound { estimate: best, parameter: best_s, witness })
}

/// Upper bound on `cap(K)`.
pub fn capacity_upper(k: &Shape, ctx: &AlphaContext, search: &CapacitySearch) -> Result<Estimate> {
    Ok(capacity_upper_witnessed(k, ctx, search)?.estimate)
}

/// Lower bound `V(K)^{(n-α)/n} / κ`.
pub fn capacity_lower(k: &Shape, ctx: &AlphaContext, kappa: f64) -> Result<f64> {
    let v = check_shape(k, ctx)?;
    if !(kappa > 0.0 && kappa.is_finite()) {
        return invalid(format!("κ must be positive, got {kappa}"));
    }
    Ok(v.powf(ctx.homogeneity() / ctx.nf()) / kappa)
}

/// Both bounds; fails if they cross beyond their error bars.
pub fn capacity_bracket(k: &Shape, ctx: &AlphaContext, search: &CapacitySearch) -> Result<CapacityBracket> {
    let kappa = sharp_constant(ctx, &search.perimeter)?;
    let lower = capacity_lower(k, ctx, kappa.value)?;
    let lower = Estimate { value: lower, error: lower * kappa.rel_error(), ..kappa };
    let up = capacity_upper_witnessed(k, ctx, search)?;
    let slack = 1e-9 + lower.rel_error() + up.estimate.rel_error();
    if lower.value > up.estimate.value * (1.0 + slack) {
        return Err(Error::InvariantViolation(format!(
            "capacity bracket inverted: lower {} > upper {}",
            lower.value, up.estimate.value
        )));
    }
    Ok(CapacityBracket { lower, upper: up.estimate, witness: up.witness, n: ctx.n(), alpha: ctx.alpha() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `r^{n-α}` times the value at `r = 1`.
    pub predicted: Vec<f64>,
    pub max_rel_dev: f64,
    /// Least-squares slope of `log cap(rK)` against `log r`, `r = 1` included.
    pub slope: f64,
    pub expected_slope: f64,
}

/// Compares `cap(rK)` with `r^{n-α} cap(K)`.
pub fn homogeneity_check(k: &Shape, ctx: &AlphaContext, radii: &[f64], search: &CapacitySearch) -> Result<HomogeneityReport> {
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return invalid("scale factors must be positive");
    }
    let base = capacity_upper(k, ctx, search)?.value;
    let values = radii
        .par_iter()
        .map(|&r| Ok(capacity_upper(&k.scale(r)?, ctx, search)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let p = ctx.homogeneity();
    let predicted: Vec<f64> = radii.iter().map(|r| base * r.powf(p)).collect();
    let max_rel_dev = values.iter().zip(&predicted).map(|(v, q)| (v - q).abs() / q).fold(0.0, f64::max);
    let mut pts: Vec<(f64, f64)> = vec![(0.0, base.ln())];
    pts.extend(radii.iter().zip(&values).map(|(r, v)| (r.ln(), v.ln())));
    let m = pts.len() as f64;
    let xb = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let yb = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xb).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xb) * (p.1 - yb)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { p };
    Ok(HomogeneityReport { radii: radii.to_vec(), values, predicted, max_rel_dev, slope, expected_slope: p })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub values: Vec<f64>,
    pub holds: bool,
}

/// Checks `cap(K_1) ≤ cap(K_2) ≤ …` along an increasing chain `K_1 ⊆ K_2 ⊆ …`.
pub fn monotonicity_check(chain: &[Shape], ctx: &AlphaContext, search: &CapacitySearch) -> Result<MonotonicityReport> {
    for (i, w) in chain.windows(2).enumerate() {
        if !w[1].contains(&w[0])? {
            return invalid(format!("chain is not increasing at position {i}"));
        }
    }
    let values = chain.par_iter().map(|s| Ok(capacity_upper(s, ctx, search)?.value)).collect::<Result<Vec<f64>>>()?;
    let holds = values.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-9));
    Ok(MonotonicityReport { values, holds })
}

/// `K_j = dilate(K, 1 + 1/j)` for the given `j`, paired with `t = 1/j`.
pub fn dilate_family(k: &Shape, js: impl IntoIterator<Item = usize>) -> Result<Vec<(f64, Shape)>> {
    js.into_iter()
        .map(|j| {
            if j == 0 {
                return invalid("family index must be positive");
            }
            let t = 1.0 / j as f64;
            Ok((t, k.dilate(1.0 + t)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UscReport {
    pub params: Vec<f64>,
    pub values: Vec<f64>,
    pub decreasing: bool,
    /// Value of the family extrapolated to `t → 0`.
    pub extrapolated: f64,
    pub limit: f64,
    pub rel_err: f64,
}

/// Fits `a + b t + c t²` to the members with the smallest `t` and returns `a`.
fn extrapolate_to_zero(params: &[f64], values: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = params.iter().copied().zip(values.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.truncate(6);
    match pts.len() {
        0 => f64::NAN,
        1 | 2 => pts[0].1,
        _ => {
            // normal equations in the scaled variable u = t / t_max
            let tm = pts.iter().map(|p| p.0).fold(0.0, f64::max);
            let mut a = [[0.0; 3]; 3];
            let mut rhs = [0.0; 3];
            for &(t, y) in &pts {
                let u = t / tm;
                let basis = [1.0, u, u * u];
                for i in 0..3 {
                    for j in 0..3 {
                        a[i][j] += basis[i] * basis[j];
                    }
                    rhs[i] += basis[i] * y;
                }
            }
            solve3(a, rhs)[0]
        }
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Follows `cap(K_j)` along a decreasing family `K_1 ⊇ K_2 ⊇ … ⊇ K`,
/// given as `(t_j, K_j)` with `t_j → 0`, and compares its limit with `cap(K)`.
pub fn usc_check(family: &[(f64, Shape)], k: &Shape, ctx: &AlphaContext, search: &CapacitySearch) -> Result<UscReport> {
    if family.is_empty() {
        return invalid("empty family");
    }
    for (i, w) in family.windows(2).enumerate() {
        if !(w[1].0 <= w[0].0) || !w[0].1.contains(&w[1].1)? {
            return invalid(format!("family is not nested decreasing at position {i}"));
        }
    }
    if !family.last().unwrap().1.contains(k)? {
        return invalid("family does not contain the limit set");
    }
    let values = family
        .par_iter()
        .map(|(_, s)| Ok(capacity_upper(s, ctx, search)?.value))
        .collect::<Result<Vec<f64>>>()?;
    let params: Vec<f64> = family.iter().map(|p| p.0).collect();
    let decreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let limit = capacity_upper(k, ctx, search)?.value;
    let extrapolated = extrapolate_to_zero(&params, &values);
    let rel_err = (extrapolated - limit).abs() / limit;
    Ok(UscReport { params, values, decreasing, extrapolated, limit, rel_err })
}

/// `cap(K; Ẇ^{1,1})` of a convex set, which is its classical perimeter.
pub fn w11_capacity(k: &Shape) -> Result<f64> {
    match k {
        Shape::Interval(_) | Shape::Ball(_) | Shape::Box(_) => k.classical_perimeter(),
        _ => unsupported(format!("classical capacity of a {}", k.kind())),
    }
}

/// Scans `α·cap` towards `2 n ω_n V(K)` and `(1-α)·cap` towards `τ_n P(K)`.
pub fn capacity_limit_checks(
    k: &Shape,
    grid0: &[f64],
    grid1: &[f64],
    search: &CapacitySearch,
) -> Result<(LimitScanResult, LimitScanResult)> {
    if LimitEnd::detect(grid0)? != LimitEnd::Zero || LimitEnd::detect(grid1)? != LimitEnd::One {
        return invalid("limit scans need one grid towards 0 and one towards 1");
    }
    let n = k.dim();
    let w11 = w11_capacity(k)?;
    let volume = k.exact_volume().expect("convex exact shape");
    let scan = |grid: &[f64], scale: &(dyn Fn(f64) -> f64 + Sync)| -> Result<Vec<f64>> {
        grid.par_iter()
            .map(|&a| Ok(scale(a) * capacity_upper(k, &AlphaContext::new(n, a)?, search)?.value))
            .collect()
    };
    let zero = LimitScanResult::new(grid0.to_vec(), scan(grid0, &|a| a)?, 2.0 * sphere_area(n) * volume)?;
    let one = LimitScanResult::new(grid1.to_vec(), scan(grid1, &|a| 1.0 - a)?, tau(n) * w11)?;
    Ok((zero, one))
}
