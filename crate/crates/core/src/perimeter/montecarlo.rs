//! Offset-space Monte Carlo for `P_α(E) = ∫ (V - g_E(h)) |h|^{-n-α} dh`.
//!
//! Offsets are drawn as `h = ρθ` with `θ` uniform on the sphere and `ρ` on
//! `(0, R)` with density `∝ ρ^{-β}`, `β > α`. Since the deficit is `O(ρ)` the
//! weights stay bounded. The far field `|h| > R` is added exactly.

use crate::constants::{kernel_tail, sphere_area, AlphaContext};
use crate::error::Result;
use crate::estimate::Estimate;
use crate::geometry::Shape;
use crate::numerics::{mc_mean, McSpec};

/// Radial importance exponent for exact deficits.
pub(crate) fn radial_exponent(alpha: f64, eps0: f64) -> f64 {
    alpha + eps0.min(0.5 * (1.0 - alpha))
}

/// Radial importance exponent for membership-only sets, where the weight is
/// an indicator times `ρ^{β-1-α}`; its variance is finite for `β > 2α`.
pub(crate) fn indicator_exponent(alpha: f64, eps0: f64) -> f64 {
    if 2.0 * alpha + eps0 < 1.0 {
        (2.0 * alpha + eps0).min(alpha + 0.5)
    } else if 2.0 * alpha < 1.0 {
        0.5 * (1.0 + 2.0 * alpha)
    } else {
        0.5 * (1.0 + alpha)
    }
}

/// Smallest radius at which deficits are evaluated; below it the deficit is
/// linear in `ρ` to full precision and its slope is reused.
const MIN_RADIUS: f64 = 1e-290;

/// `ρ = R u^{1/(1-β)}` has density `(1-β) ρ^{-β} / R^{1-β}` on `(0, R)`.
/// Returns `ln ρ` and `ρ^{-α} / density` (one factor of `ρ` is left for the
/// deficit slope), computed in log space because `ρ` underflows for `β` near 1.
fn draw_radius(u: f64, r: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let ln_rho = r.ln() + u.ln() / (1.0 - beta);
    let w = ((beta - alpha) * ln_rho).exp() * r.powf(1.0 - beta) / (1.0 - beta);
    (ln_rho, w)
}

pub(crate) fn perimeter_mc(shape: &Shape, ctx: &AlphaContext, mc: &McSpec, eps0: f64) -> Result<Estimate> {
    let n = ctx.n();
    let alpha = ctx.alpha();
    let r = shape.diameter();
    let area = sphere_area(n);
    let tail = kernel_tail(ctx, r)?;

    if let Shape::Indicator(set) = shape {
        let beta = indicator_exponent(alpha, eps0);
        let bbox = set.bbox().clone();
        let bv = bbox.volume();
        let hint = set.volume_hint();
        let est = mc_mean(mc, |st| {
            let mut x = [0.0; 16];
            let mut dir = [0.0; 16];
            for i in 0..n {
                x[i] = st.uniform_in(bbox.lo()[i], bbox.hi()[i]);
            }
            st.direction(&mut dir[..n]);
            let (ln_rho, w) = draw_radius(st.uniform_open(), r, alpha, beta);
            let rho = ln_rho.exp().max(MIN_RADIUS);
            if !set.contains(&x[..n]) {
                return 0.0;
            }
            let far = if hint.is_some() { 0.0 } else { tail };
            for i in 0..n {
                x[i] -= rho * dir[i];
            }
            let near = if set.contains(&x[..n]) { 0.0 } else { area * w / rho };
            bv * (far + near)
        })?;
        return Ok(match hint {
            Some(v) => Estimate { value: est.value + v * tail, ..est },
            None => est,
        });
    }

    let volume = shape.exact_volume().expect("exact shapes carry their volume");
    let beta = radial_exponent(alpha, eps0);
    let radial = matches!(shape, Shape::Ball(_));
    let est = mc_mean(mc, |st| {
        let mut h = [0.0; 16];
        st.direction(&mut h[..n]);
        let (ln_rho, w) = draw_radius(st.uniform_open(), r, alpha, beta);
        let rho = ln_rho.exp().max(MIN_RADIUS);
        let f = if radial {
            shape.radial_deficit(rho).unwrap()
        } else {
            for x in h[..n].iter_mut() {
                *x *= rho;
            }
            shape.deficit(&h[..n]).unwrap()
        };
        area * (f / rho) * w
    })?;
    Ok(Estimate { value: est.value + volume * tail, ..est })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_stay_in_range() {
        for a in [0.05, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let b = radial_exponent(a, 0.1);
            assert!(b > a && b < 1.0, "{a} -> {b}");
            let b = indicator_exponent(a, 0.1);
            assert!(b > a && b < 1.0, "{a} -> {b}");
            if a < 0.5 {
                assert!(b > 2.0 * a);
            }
        }
    }

    #[test]
    fn interval_estimate_within_three_sigma() {
        let ctx = AlphaContext::new(1, 0.5).unwrap();
        let s = Shape::interval(0.0, 1.0).unwrap();
        let e = perimeter_mc(&s, &ctx, &McSpec::new(200_000, 11), 0.1).unwrap();
        assert!((e.value - 8.0).abs() < 3.0 * e.error, "{e}");
    }
}
