//! The fractional perimeter
//! `P_α(E) = ∫_E ∫_{E^c} |x - y|^{-n-α} dx dy = ∫ (V(E) - g_E(h)) |h|^{-n-α} dh`
//! and its limits as `α → 0` and `α → 1`.
//!
//! The offset integral is split at `R = diam(E)`, beyond which the
//! covariogram vanishes and the remaining kernel mass is known exactly.

mod angular;
pub(crate) mod lattice;
mod montecarlo;

use serde::{Deserialize, Serialize};

use crate::constants::{kappa, kernel_tail, sphere_area, tau, unit_ball_volume, AlphaContext};
use crate::error::{invalid, unsupported, Error, Result};
use crate::estimate::Estimate;
use crate::geometry::Shape;
use crate::numerics::{integrate_1d, LimitEnd, LimitScanResult, McSpec, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerimeterMethod {
    #[default]
    Auto,
    Quadrature,
    MonteCarlo,
}

impl std::str::FromStr for PerimeterMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(PerimeterMethod::Auto),
            "quad" | "quadrature" => Ok(PerimeterMethod::Quadrature),
            "mc" | "monte-carlo" => Ok(PerimeterMethod::MonteCarlo),
            other => invalid(format!("unknown method '{other}' (auto, quad, mc)")),
        }
    }
}

/// How to evaluate a perimeter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerimeterSpec {
    pub method: PerimeterMethod,
    /// Radial quadrature tolerances; the endpoint exponent is set internally.
    pub quad: QuadratureSpec,
    pub mc: McSpec,
    /// Offset sampling uses radial density `∝ ρ^{-α-ε0}`.
    pub eps0: f64,
}

impl Default for PerimeterSpec {
    fn default() -> Self {
        PerimeterSpec {
            method: PerimeterMethod::Auto,
            quad: QuadratureSpec::with_tol(1e-13, 1e-10),
            mc: McSpec::default(),
            eps0: 0.1,
        }
    }
}

impl PerimeterSpec {
    pub fn with_method(mut self, method: PerimeterMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_mc(mut self, mc: McSpec) -> Self {
        self.mc = mc;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.quad.rel_tol = rel_tol;
        self
    }
}

/// Radial panel budget when the angular average is itself adaptive.
const NESTED_RADIAL_SUBDIVISIONS: usize = 100;

/// Box unions backed by a lattice are integrated from their offset table.
fn uses_lattice(shape: &Shape) -> bool {
    match shape {
        Shape::BoxUnion(u) => u.prefers_lattice(),
        _ => false,
    }
}

/// `P_α(E)`.
pub fn frac_perimeter(shape: &Shape, ctx: &AlphaContext, spec: &PerimeterSpec) -> Result<Estimate> {
    if shape.dim() != ctx.n() {
        return invalid(format!("shape has dimension {} but context has n = {}", shape.dim(), ctx.n()));
    }
    if !(spec.eps0 > 0.0) {
        return invalid("eps0 must be positive");
    }
    let quadrature_ok = match shape {
        Shape::Indicator(_) => false,
        Shape::Interval(_) | Shape::Ball(_) => true,
        _ => ctx.n() <= 3 || uses_lattice(shape),
    };
    match spec.method {
        PerimeterMethod::MonteCarlo => montecarlo::perimeter_mc(shape, ctx, &spec.mc, spec.eps0),
        PerimeterMethod::Quadrature if !quadrature_ok => match shape {
            Shape::Indicator(_) => unsupported("quadrature perimeter of a membership-only set"),
            _ => unsupported(format!("quadrature perimeter of a {} in dimension {}", shape.kind(), ctx.n())),
        },
        PerimeterMethod::Auto if !quadrature_ok => montecarlo::perimeter_mc(shape, ctx, &spec.mc, spec.eps0),
        _ => perimeter_quadrature(shape, ctx, &spec.quad),
    }
}

/// `‖1_E‖ = 2 P_α(E)`.
pub fn frac_perimeter_indicator_seminorm(shape: &Shape, ctx: &AlphaContext, spec: &PerimeterSpec) -> Result<Estimate> {
    Ok(frac_perimeter(shape, ctx, spec)?.scaled(2.0))
}

/// `κ_{n,α} = ω_n^{(n-α)/n} / (2 P_α(B^n))` with `P_α(B^n)` computed under
/// `spec`; the error is the relative error of the ball perimeter.
pub fn sharp_constant(ctx: &AlphaContext, spec: &PerimeterSpec) -> Result<Estimate> {
    let p = frac_perimeter(&Shape::unit_ball(ctx.n())?, ctx, spec)?;
    let k = kappa(ctx, p.value)?;
    Ok(Estimate { value: k, error: k * p.rel_error(), ..p })
}

fn perimeter_quadrature(shape: &Shape, ctx: &AlphaContext, quad: &QuadratureSpec) -> Result<Estimate> {
    if let Shape::BoxUnion(u) = shape {
        if uses_lattice(shape) {
            let table = u.lattice().unwrap().deficit_table();
            return Ok(lattice::table_integral(table, ctx.alpha()));
        }
    }
    let n = ctx.n();
    let r = shape.diameter();
    let volume = shape.exact_volume().expect("exact shapes carry their volume");
    let far = Estimate::exact(volume * kernel_tail(ctx, r)?);
    let kinks: Vec<Vec<f64>> = (0..n).map(|a| shape.kinks(a)).collect();
    let deficit = |h: &[f64]| shape.deficit(h).unwrap();
    let inner_tol = (quad.rel_tol * 1e-2).max(1e-13);

    let spherical = |rho: f64| -> Result<f64> {
        Ok(match shape {
            Shape::Ball(_) => sphere_area(n) * shape.radial_deficit(rho).unwrap(),
            _ => match n {
                1 => angular::average_1d(&deficit, rho),
                2 => angular::average_2d(&deficit, &kinks, rho),
                _ => angular::average_3d(&deficit, &kinks, rho, inner_tol)?,
            },
        })
    };
    // each 3-d radial node costs a nested adaptive angular integral
    let quad = if n >= 3 && !matches!(shape, Shape::Ball(_)) {
        QuadratureSpec { max_subdivisions: quad.max_subdivisions.min(NESTED_RADIAL_SUBDIVISIONS), ..*quad }
    } else {
        *quad
    };
    match radial_integral(spherical, &shape.radial_kinks(), r, ctx.alpha(), &quad) {
        Ok(near) => Ok(near.plus(far)),
        Err(Error::ConvergenceFailure { message, best }) => Err(Error::ConvergenceFailure { message, best: best.plus(far) }),
        Err(e) => Err(e),
    }
}

/// `∫_0^R A(ρ) ρ^{-1-α} dρ` over panels between the radial kinks.
fn radial_integral<A>(a: A, kinks: &[f64], r: f64, alpha: f64, quad: &QuadratureSpec) -> Result<Estimate>
where
    A: Fn(f64) -> Result<f64>,
{
    let mut breaks: Vec<f64> = kinks.iter().copied().filter(|&c| c > 0.0 && c < r * (1.0 - 1e-14)).collect();
    breaks.insert(0, 0.0);
    breaks.push(r);
    let failure = std::cell::Cell::new(None);
    let integrand = |rho: f64| match a(rho) {
        Ok(v) => (v / rho) * rho.powf(-alpha),
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let mut total = Estimate::quadrature(0.0, 0.0);
    let mut converged = true;
    for (i, w) in breaks.windows(2).enumerate() {
        let spec = if i == 0 { quad.singular(-alpha) } else { quad.regular() };
        match integrate_1d(integrand, w[0], w[1], &spec) {
            Ok(e) => total = total.plus(e),
            Err(Error::ConvergenceFailure { best, .. }) => {
                converged = false;
                total = total.plus(best);
            }
            Err(e) => return Err(e),
        }
        if let Some(e) = failure.take() {
            return Err(e);
        }
    }
    if converged {
        Ok(total)
    } else {
        Err(Error::ConvergenceFailure { message: "radial perimeter integral".into(), best: total })
    }
}

/// Scans `α·P_α(E)` towards `n ω_n V(E)` as `α → 0`.
pub fn limit_alpha0_check(shape: &Shape, grid: &[f64], spec: &PerimeterSpec) -> Result<LimitScanResult> {
    if LimitEnd::detect(grid)? != LimitEnd::Zero {
        return invalid("α → 0 scan needs a grid approaching 0");
    }
    let n = shape.dim();
    let volume = shape.volume_with(&spec.mc)?.value;
    let target = n as f64 * unit_ball_volume(n) * volume;
    let values = grid
        .iter()
        .map(|&a| Ok(a * frac_perimeter(shape, &AlphaContext::new(n, a)?, spec)?.value))
        .collect::<Result<Vec<_>>>()?;
    LimitScanResult::new(grid.to_vec(), values, target)
}

/// Scans `(1-α)·P_α(E)` towards `τ_n P(E) / 2` as `α → 1`.
pub fn limit_alpha1_check(shape: &Shape, grid: &[f64], spec: &PerimeterSpec) -> Result<LimitScanResult> {
    if LimitEnd::detect(grid)? != LimitEnd::One {
        return invalid("α → 1 scan needs a grid approaching 1");
    }
    let n = shape.dim();
    let target = 0.5 * tau(n) * shape.classical_perimeter()?;
    let values = grid
        .iter()
        .map(|&a| Ok((1.0 - a) * frac_perimeter(shape, &AlphaContext::new(n, a)?, spec)?.value))
        .collect::<Result<Vec<_>>>()?;
    LimitScanResult::new(grid.to_vec(), values, target)
}

#[cfg(test)]
mod tests;
