//! Numerical checks of the sharp fractional Sobolev, isoperimetric and
//! isocapacitary inequalities and of the capacitary strong-type splittings
//! between them, with `q = n/(n-α)` throughout:
//!
//! ```text
//! eq1            ‖f‖_q ≤ κ (∫ cap(O_t)^q d(t^q))^{1/q}
//! eq2            V(O)^{1/q} ≤ κ cap(Ō)
//! eq3            (∫ cap(O_t)^q d(t^q))^{1/q} ≤ ‖f‖_{Λ̇}
//! eq4            cap(Ō) ≤ 2 P_α(O)
//! sobolev        ‖f‖_q ≤ κ ‖f‖_{Λ̇}
//! isocapacitary  V(O)^{1/q} ≤ κ cap(Ō)
//! isoperimetric  V(O)^{1/q} ≤ 2κ P_α(O)
//! ```
//!
//! Here `O_t = {|f| > t}` and `κ = ω_n^{1/q} / (2 P_α(B^n))`. Capacities are
//! the upper bounds of the capacity module.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::besov::{besov_seminorm, build_cutoff, bump, level_integral, tent, LevelRule, SampledFunction};
use crate::capacity::{capacity_upper, CapacitySearch, Family};
use crate::constants::AlphaContext;
use crate::error::{invalid, Error, Result};
use crate::estimate::Estimate;
use crate::geometry::{AxisBox, Shape};
use crate::perimeter::{frac_perimeter, sharp_constant, PerimeterSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InequalityId {
    Eq1,
    Eq2,
    Eq3,
    Eq4,
    Sobolev,
    Isocapacitary,
    Isoperimetric,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::Eq1,
        InequalityId::Eq2,
        InequalityId::Eq3,
        InequalityId::Eq4,
        InequalityId::Sobolev,
        InequalityId::Isocapacitary,
        InequalityId::Isoperimetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Eq1 => "eq1",
            InequalityId::Eq2 => "eq2",
            InequalityId::Eq3 => "eq3",
            InequalityId::Eq4 => "eq4",
            InequalityId::Sobolev => "sobolev",
            InequalityId::Isocapacitary => "isocapacitary",
            InequalityId::Isoperimetric => "isoperimetric",
        }
    }

    /// Whether the inequality is stated for functions rather than sets.
    pub fn takes_function(self) -> bool {
        matches!(self, InequalityId::Eq1 | InequalityId::Eq3 | InequalityId::Sobolev)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eq1" => Ok(InequalityId::Eq1),
            "eq2" => Ok(InequalityId::Eq2),
            "eq3" => Ok(InequalityId::Eq3),
            "eq4" => Ok(InequalityId::Eq4),
            "sobolev" => Ok(InequalityId::Sobolev),
            "isocapacitary" | "isocap" => Ok(InequalityId::Isocapacitary),
            "isoperimetric" | "isoper" => Ok(InequalityId::Isoperimetric),
            other => invalid(format!(
                "unknown inequality '{other}' (eq1, eq2, eq3, eq4, sobolev, isocapacitary, isoperimetric)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Both sides of one inequality, evaluated on one input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    pub inequality_id: InequalityId,
    pub subject: String,
    pub n: usize,
    pub alpha: f64,
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// `lhs / rhs`, and `0` when both vanish.
    pub ratio: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    pub tol: f64,
    pub status: Status,
    pub detail: String,
}

impl DeficitReport {
    /// Passes iff `lhs ≤ rhs (1 + tol)`, with `tol = 1e-6` plus the relative
    /// errors of both sides (tripled when either side is Monte Carlo).
    pub fn compare(
        id: InequalityId,
        subject: impl Into<String>,
        ctx: &AlphaContext,
        lhs: Estimate,
        rhs: Estimate,
        detail: impl Into<String>,
    ) -> DeficitReport {
        let widen = if lhs.is_monte_carlo() || rhs.is_monte_carlo() { 3.0 } else { 1.0 };
        let tol = 1e-6 + widen * (lhs.rel_error() + rhs.rel_error());
        let ratio = if lhs.value == 0.0 && rhs.value == 0.0 { 0.0 } else { lhs.value / rhs.value };
        let status = if lhs.value <= rhs.value * (1.0 + tol) { Status::Pass } else { Status::Fail };
        DeficitReport {
            inequality_id: id,
            subject: subject.into(),
            n: ctx.n(),
            alpha: ctx.alpha(),
            lhs,
            rhs,
            ratio,
            slack: rhs.value - lhs.value,
            tol,
            status,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Numerical settings shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySpec {
    pub perimeter: PerimeterSpec,
    /// Family search for capacities of the sets under test.
    pub search: CapacitySearch,
    /// Level rule for the capacity integral; `None` picks one per function.
    pub levels: Option<LevelRule>,
}

impl Default for VerifySpec {
    fn default() -> Self {
        let perimeter = PerimeterSpec::default();
        VerifySpec { perimeter, search: CapacitySearch::default().with_perimeter(perimeter), levels: None }
    }
}

impl VerifySpec {
    pub fn with_perimeter(mut self, perimeter: PerimeterSpec) -> Self {
        self.perimeter = perimeter;
        self.search.perimeter = perimeter;
        self
    }

    fn level_rule(&self, f: &SampledFunction) -> LevelRule {
        self.levels.unwrap_or_else(|| LevelRule::for_function(f))
    }
}

fn check_dim(n: usize, ctx: &AlphaContext) -> Result<()> {
    if n != ctx.n() {
        return invalid(format!("input has dimension {n} but context has n = {}", ctx.n()));
    }
    Ok(())
}

/// `x^p` with first-order error propagation.
fn power(e: Estimate, p: f64) -> Estimate {
    let v = e.value.powf(p);
    Estimate { value: v, error: (p * e.rel_error() * v).abs(), ..e }
}

fn product(a: Estimate, b: Estimate) -> Estimate {
    let v = a.value * b.value;
    let joined = a.plus(b);
    let error = if joined.method == crate::Method::Exact { 0.0 } else { (a.rel_error() + b.rel_error()) * v.abs() };
    Estimate { value: v, error, ..joined }
}

fn set_volume(shape: &Shape) -> Result<f64> {
    match shape.exact_volume() {
        Some(v) if v > 0.0 => Ok(v),
        Some(_) => invalid("set has zero volume"),
        None => invalid("set volume is not known exactly"),
    }
}

/// `(∫_0^∞ cap(closure O_t)^q d(t^q))^{1/q}`, each capacity the family
/// bound evaluated on the level set itself.
pub fn capacity_level_integral(f: &SampledFunction, ctx: &AlphaContext, spec: &VerifySpec) -> Result<Estimate> {
    check_dim(f.dim(), ctx)?;
    let q = ctx.q();
    let search = CapacitySearch::at_zero(spec.perimeter);
    let j = level_integral(f, spec.level_rule(f), q, |_, s| Ok(power(capacity_upper(s, ctx, &search)?, q)))?;
    if j.value == 0.0 {
        return Ok(j);
    }
    Ok(power(j, 1.0 / q))
}

/// `‖f‖_q ≤ κ ‖f‖_{Λ̇}`.
pub fn verify_sobolev(f: &SampledFunction, ctx: &AlphaContext, kappa: &Estimate) -> Result<DeficitReport> {
    check_dim(f.dim(), ctx)?;
    let lhs = Estimate::exact(f.lp_norm(ctx.q())?);
    let rhs = product(*kappa, besov_seminorm(f, ctx)?);
    Ok(DeficitReport::compare(InequalityId::Sobolev, f.label(), ctx, lhs, rhs, "‖f‖_q ≤ κ‖f‖"))
}

/// `V(E)^{(n-α)/n} ≤ 2κ P_α(E)`.
pub fn verify_isoperimetric(e: &Shape, ctx: &AlphaContext, kappa: &Estimate, spec: &VerifySpec) -> Result<DeficitReport> {
    check_dim(e.dim(), ctx)?;
    let lhs = Estimate::exact(set_volume(e)?.powf(1.0 / ctx.q()));
    let rhs = product(*kappa, frac_perimeter(e, ctx, &spec.perimeter)?.scaled(2.0));
    Ok(DeficitReport::compare(InequalityId::Isoperimetric, e.describe(), ctx, lhs, rhs, "V^{1/q} ≤ 2κP_α"))
}

fn isocapacitary(
    id: InequalityId,
    o: &Shape,
    ctx: &AlphaContext,
    kappa: &Estimate,
    search: &CapacitySearch,
) -> Result<DeficitReport> {
    check_dim(o.dim(), ctx)?;
    let lhs = Estimate::exact(set_volume(o)?.powf(1.0 / ctx.q()));
    let cap = capacity_upper(o, ctx, search)?;
    let rhs = product(*kappa, cap);
    // κ times the lower bound reproduces lhs by construction
    let detail = format!("V^{{1/q}} ≤ κ·cap; κ·cap lower bound = {:e}; family {}", lhs.value, search.family.as_str());
    Ok(DeficitReport::compare(id, o.describe(), ctx, lhs, rhs, detail))
}

/// `V(O)^{(n-α)/n} ≤ κ cap(O)` with the capacity bound from `spec.search`.
pub fn verify_isocapacitary(o: &Shape, ctx: &AlphaContext, kappa: &Estimate, spec: &VerifySpec) -> Result<DeficitReport> {
    isocapacitary(InequalityId::Isocapacitary, o, ctx, kappa, &spec.search)
}

/// `V(O)^{(n-α)/n} ≤ κ cap(Ō)`, bounding the capacity of the closure over
/// its open neighbourhoods.
pub fn verify_eq2(o: &Shape, ctx: &AlphaContext, kappa: &Estimate, spec: &VerifySpec) -> Result<DeficitReport> {
    isocapacitary(InequalityId::Eq2, o, ctx, kappa, &spec.search.with_family(Family::Neighborhoods))
}

/// `cap(Ō) ≤ 2 P_α(O)`.
pub fn verify_eq4(o: &Shape, ctx: &AlphaContext, spec: &VerifySpec) -> Result<DeficitReport> {
    check_dim(o.dim(), ctx)?;
    set_volume(o)?;
    let lhs = capacity_upper(o, ctx, &spec.search.with_family(Family::Neighborhoods))?;
    let rhs = frac_perimeter(o, ctx, &spec.perimeter)?.scaled(2.0);
    Ok(DeficitReport::compare(InequalityId::Eq4, o.describe(), ctx, lhs, rhs, "cap(Ō) ≤ 2P_α(O)"))
}

fn eq1_report(f: &SampledFunction, ctx: &AlphaContext, kappa: &Estimate, integral: Estimate) -> Result<DeficitReport> {
    let lhs = Estimate::exact(f.lp_norm(ctx.q())?);
    let rhs = product(*kappa, integral);
    Ok(DeficitReport::compare(InequalityId::Eq1, f.label(), ctx, lhs, rhs, "‖f‖_q ≤ κ(∫cap^q d(t^q))^{1/q}"))
}

fn eq3_report(f: &SampledFunction, ctx: &AlphaContext, integral: Estimate, besov: Estimate) -> DeficitReport {
    DeficitReport::compare(InequalityId::Eq3, f.label(), ctx, integral, besov, "(∫cap^q d(t^q))^{1/q} ≤ ‖f‖")
}

/// `‖f‖_q ≤ κ (∫ cap(O_t)^q d(t^q))^{1/q}`.
pub fn verify_cap_strong_sobolev(
    f: &SampledFunction,
    ctx: &AlphaContext,
    kappa: &Estimate,
    spec: &VerifySpec,
) -> Result<DeficitReport> {
    eq1_report(f, ctx, kappa, capacity_level_integral(f, ctx, spec)?)
}

/// `(∫ cap(O_t)^q d(t^q))^{1/q} ≤ ‖f‖_{Λ̇}`.
pub fn verify_truncation(f: &SampledFunction, ctx: &AlphaContext, spec: &VerifySpec) -> Result<DeficitReport> {
    let integral = capacity_level_integral(f, ctx, spec)?;
    Ok(eq3_report(f, ctx, integral, besov_seminorm(f, ctx)?))
}

/// Runs eq1, eq3 and the Sobolev inequality on the same function and checks
/// that the Sobolev ratio is the product of the other two.
pub fn verify_chain(
    f: &SampledFunction,
    ctx: &AlphaContext,
    kappa: &Estimate,
    spec: &VerifySpec,
) -> Result<Vec<DeficitReport>> {
    let integral = capacity_level_integral(f, ctx, spec)?;
    let besov = besov_seminorm(f, ctx)?;
    let first = eq1_report(f, ctx, kappa, integral)?;
    let second = eq3_report(f, ctx, integral, besov);
    let whole = verify_sobolev(f, ctx, kappa)?;
    if first.passed() && second.passed() && !whole.passed() {
        return Err(Error::InvariantViolation(format!("{}: eq1 and eq3 pass but the Sobolev inequality fails", f.label())));
    }
    if integral.value > 0.0 {
        let composed = first.ratio * second.ratio;
        if (composed - whole.ratio).abs() > 1e-9 * whole.ratio.abs() {
            return Err(Error::InvariantViolation(format!(
                "{}: Sobolev ratio {} differs from the composed ratio {composed}",
                f.label(),
                whole.ratio
            )));
        }
    }
    Ok(vec![first, second, whole])
}

/// `|1 - V(B)^{(n-α)/n} / (κ cap(B))|` for the unit ball.
pub fn sharpness_gap(ctx: &AlphaContext, spec: &VerifySpec) -> Result<Estimate> {
    let kappa = sharp_constant(ctx, &spec.perimeter)?;
    let ball = Shape::unit_ball(ctx.n())?;
    let cap = capacity_upper(&ball, ctx, &spec.search)?;
    let r = Estimate::exact(set_volume(&ball)?.powf(1.0 / ctx.q()));
    let ratio = product(kappa, cap);
    let g = (1.0 - r.value / ratio.value).abs();
    Ok(Estimate { value: g, error: ratio.rel_error(), ..ratio })
}

/// Checks a function inequality (`eq1`, `eq3`, `sobolev`).
pub fn verify_function(id: InequalityId, f: &SampledFunction, ctx: &AlphaContext, spec: &VerifySpec) -> Result<DeficitReport> {
    match id {
        InequalityId::Eq1 => verify_cap_strong_sobolev(f, ctx, &sharp_constant(ctx, &spec.perimeter)?, spec),
        InequalityId::Eq3 => verify_truncation(f, ctx, spec),
        InequalityId::Sobolev => verify_sobolev(f, ctx, &sharp_constant(ctx, &spec.perimeter)?),
        other => invalid(format!("{other} is an inequality for sets")),
    }
}

/// Checks a set inequality (`eq2`, `eq4`, `isocapacitary`, `isoperimetric`).
pub fn verify_shape(id: InequalityId, o: &Shape, ctx: &AlphaContext, spec: &VerifySpec) -> Result<DeficitReport> {
    match id {
        InequalityId::Eq2 => verify_eq2(o, ctx, &sharp_constant(ctx, &spec.perimeter)?, spec),
        InequalityId::Eq4 => verify_eq4(o, ctx, spec),
        InequalityId::Isocapacitary => verify_isocapacitary(o, ctx, &sharp_constant(ctx, &spec.perimeter)?, spec),
        InequalityId::Isoperimetric => verify_isoperimetric(o, ctx, &sharp_constant(ctx, &spec.perimeter)?, spec),
        other => invalid(format!("{other} is an inequality for functions")),
    }
}

/// Cutoff width used for the suite's plateau functions.
pub const SUITE_EPS: f64 = 0.25;

/// Test functions: tents, a bump and Lipschitz cutoffs of an interval, a
/// square and a disk.
pub fn suite_functions() -> Result<Vec<SampledFunction>> {
    Ok(vec![
        tent(1, 1024.0)?,
        tent(2, 32.0)?,
        bump(2, 1.0, 32.0)?,
        build_cutoff(&Shape::interval(-1.0, 1.0)?, SUITE_EPS, 8.0)?,
        build_cutoff(&Shape::axis_box(vec![0.0, 0.0], vec![1.0, 1.0])?, SUITE_EPS, 8.0)?,
        build_cutoff(&Shape::unit_ball(2)?, SUITE_EPS, 8.0)?,
    ])
}

/// Test sets: two intervals, a disk, a square, an L-shape and a ball in 3D.
pub fn suite_shapes() -> Result<Vec<Shape>> {
    Ok(vec![
        Shape::interval(-1.0, 1.0)?,
        Shape::interval(0.0, 1.0)?,
        Shape::unit_ball(2)?,
        Shape::axis_box(vec![0.0, 0.0], vec![1.0, 1.0])?,
        Shape::box_union(vec![
            AxisBox::new(vec![0.0, 0.0], vec![2.0, 1.0])?,
            AxisBox::new(vec![0.0, 1.0], vec![1.0, 2.0])?,
        ])?,
        Shape::unit_ball(3)?,
    ])
}

#[cfg(test)]
mod tests;
