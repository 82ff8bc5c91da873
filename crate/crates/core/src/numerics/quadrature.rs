use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};
use crate::estimate::Estimate;

use super::gauss::{WG7, WGK15, XGK15};

/// Tolerances and endpoint model for [`integrate_1d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Exponent `γ` of the leading behaviour `(t - a)^γ` at the left endpoint.
    pub endpoint_exponent: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-8, max_subdivisions: 2000, endpoint_exponent: 0.0 }
    }
}

impl QuadratureSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec { abs_tol, rel_tol, ..Default::default() }
    }

    pub fn singular(mut self, exponent: f64) -> Self {
        self.endpoint_exponent = exponent;
        self
    }

    pub fn regular(mut self) -> Self {
        self.endpoint_exponent = 0.0;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return invalid("quadrature needs abs_tol > 0 or rel_tol > 0");
        }
        if self.max_subdivisions < 16 {
            return invalid("max_subdivisions must be at least 16");
        }
        if !(self.endpoint_exponent > -1.0) {
            return invalid(format!("endpoint exponent {} must exceed -1", self.endpoint_exponent));
        }
        Ok(())
    }
}

// The substituted integrand is treated as constant below u0, where
// t - a = (b - a) * HEAD_FRACTION.
const HEAD_FRACTION: f64 = 1e-30;

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// When `spec.endpoint_exponent < 0` the variable change
/// `t = a + (b - a) u^p`, `p = 1 / (1 + γ)`, turns the power singularity into
/// a bounded integrand; uniform bisection in `u` is then a geometrically
/// graded mesh in `t`. The sliver `t - a < 1e-30 (b - a)` is integrated from
/// the leading power law and its deviation is charged to the error.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(a < b) {
        return invalid(format!("integration bounds must satisfy a < b, got [{a}, {b}]"));
    }
    let gamma = spec.endpoint_exponent;
    if gamma >= 0.0 {
        return adaptive(&f, a, b, spec, 0.0, 0.0);
    }
    let width = b - a;
    let p = 1.0 / (1.0 + gamma);
    let g = |u: f64| {
        let up = u.powf(p);
        let jac = width * p * u.powf(p - 1.0);
        if jac == 0.0 {
            0.0
        } else {
            f(a + width * up) * jac
        }
    };
    let u0 = HEAD_FRACTION.powf(1.0 / p);
    let g0 = g(u0);
    let g1 = g(0.5 * u0);
    let head = g0 * u0;
    let head_err = (g0 - g1).abs() * u0 + f64::EPSILON * head.abs();
    adaptive(&g, u0, 1.0, spec, head, head_err)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    extra: f64,
    extra_err: f64,
) -> Result<Estimate> {
    let first = kronrod15(f, a, b);
    let mut total = first.value + extra;
    let mut total_err = first.error + extra_err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut count = 1usize;
    loop {
        if !total.is_finite() {
            return Err(Error::ConvergenceFailure {
                message: "non-finite integrand".into(),
                best: Estimate::quadrature(total, f64::INFINITY),
            });
        }
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target {
            return Ok(Estimate::quadrature(total, total_err));
        }
        if count >= spec.max_subdivisions {
            return Err(Error::ConvergenceFailure {
                message: format!("{count} subdivisions reached with error {total_err:e} > {target:e}"),
                best: Estimate::quadrature(total, total_err),
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval cannot be split further in floating point.
            return Err(Error::ConvergenceFailure {
                message: "subinterval collapsed below machine resolution".into(),
                best: Estimate::quadrature(total, total_err),
            });
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        count += 1;
        if count.is_multiple_of(64) {
            // re-sum to stop drift in the running totals
            total = heap.iter().map(|s| s.value).sum::<f64>() + extra;
            total_err = heap.iter().map(|s| s.error).sum::<f64>() + extra_err;
        }
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK15[7];
    let mut res_g = fc * WG7[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK15[j];
        let f1 = f(c - x);
        let f2 = f(c + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK15[j] * (f1 + f2);
        res_abs += WGK15[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG7[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK15[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK15[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment { a, b, value, error: err }
}
