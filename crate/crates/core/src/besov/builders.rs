//! Standard test functions.

use crate::error::{invalid, unsupported, Result};
use crate::geometry::{AxisBox, Shape};

use super::SampledFunction;

/// Fewest grid cells allowed across the transition layer of a cutoff.
pub const MIN_CELLS_PER_EPS: f64 = 8.0;

fn cube(n: usize, r: f64) -> AxisBox {
    AxisBox::new_unchecked(vec![-r; n], vec![r; n])
}

/// `max(0, 1 - max_i |x_i|)`: the tent for `n = 1`, a pyramid above.
pub fn tent(n: usize, cells_per_unit: f64) -> Result<SampledFunction> {
    if n == 0 {
        return invalid("tent needs n >= 1");
    }
    let f = SampledFunction::from_fn(&cube(n, 1.0), cells_per_unit, |x| {
        (1.0 - x.iter().fold(0.0f64, |m, v| m.max(v.abs()))).max(0.0)
    })?;
    Ok(f.with_label(format!("tent:n={n}")))
}

/// `exp(1 - 1/(1 - |x/r|²))` inside the ball of radius `r`, zero outside.
pub fn bump(n: usize, r: f64, cells_per_unit: f64) -> Result<SampledFunction> {
    if n == 0 || !(r > 0.0 && r.is_finite()) {
        return invalid("bump needs n >= 1 and r > 0");
    }
    let f = SampledFunction::from_fn(&cube(n, r), cells_per_unit, |x| {
        let s = x.iter().map(|v| v * v).sum::<f64>() / (r * r);
        if s < 1.0 {
            (1.0 - 1.0 / (1.0 - s)).exp()
        } else {
            0.0
        }
    })?;
    Ok(f.with_label(format!("bump:n={n},r={r}")))
}

/// The Lipschitz cutoff `max(0, 1 - dist(x, E)/ε)`, equal to 1 on `E`.
pub fn build_cutoff(shape: &Shape, eps: f64, cells_per_eps: f64) -> Result<SampledFunction> {
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("cutoff width must be positive, got {eps}"));
    }
    if !(cells_per_eps >= MIN_CELLS_PER_EPS) {
        return invalid(format!("grid too coarse: {cells_per_eps} cells per ε, need at least {MIN_CELLS_PER_EPS}"));
    }
    if matches!(shape, Shape::Indicator(_)) {
        return unsupported("cutoff of a membership-only set");
    }
    let support = shape.bounding_box().expanded(eps);
    let f = SampledFunction::from_fn(&support, cells_per_eps / eps, |x| {
        let d = shape.distance(x).expect("exact shape");
        (1.0 - d / eps).max(0.0)
    })?;
    Ok(f.with_label(format!("cutoff:shape={},eps={eps}", shape.describe())))
}
