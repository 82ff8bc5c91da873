//! Spherical integrals `A(ρ) = ∫_{S^{n-1}} F(ρθ) dσ(θ)` of a deficit `F`
//! that is piecewise polynomial with kinks on the planes `|h_i| = c`.
//!
//! The sphere is cut along those planes so every Gauss panel sees a smooth
//! integrand.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::numerics::{gauss_rule, integrate_1d, QuadratureSpec};

fn panel_order(width: f64) -> usize {
    if width > 0.5 {
        14
    } else if width > 0.1 {
        10
    } else {
        6
    }
}

fn sorted_breaks(mut b: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    b.retain(|x| *x > lo && *x < hi);
    b.push(lo);
    b.push(hi);
    b.sort_by(f64::total_cmp);
    b.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    b
}

/// `∫_0^{2π} F(r cos φ, r sin φ, z) dφ` for the 3-D hemisphere slices, and the
/// planar circle integral when `z` is absent.
fn circle_integral<F>(f: &F, kx: &[f64], ky: &[f64], r: f64, z: Option<f64>, half: bool) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let top = if half { PI } else { 2.0 * PI };
    let mut b = vec![FRAC_PI_2, PI, 1.5 * PI];
    for &c in kx {
        if c > 0.0 && c < r {
            let a = (c / r).acos();
            b.extend([a, PI - a, PI + a, 2.0 * PI - a]);
        }
    }
    for &c in ky {
        if c > 0.0 && c < r {
            let a = (c / r).asin();
            b.extend([a, PI - a, PI + a, 2.0 * PI - a]);
        }
    }
    let b = sorted_breaks(b, 0.0, top);
    let mut acc = 0.0;
    let mut h = [0.0; 3];
    for w in b.windows(2) {
        let rule = gauss_rule(panel_order(w[1] - w[0]));
        for (phi, wt) in rule.mapped(w[0], w[1]) {
            h[0] = r * phi.cos();
            h[1] = r * phi.sin();
            let v = match z {
                Some(z) => {
                    h[2] = z;
                    f(&h[..3])
                }
                None => f(&h[..2]),
            };
            acc += wt * v;
        }
    }
    acc
}

/// `A(ρ)` in one dimension: `F(ρ) + F(-ρ)`.
pub(crate) fn average_1d<F: Fn(&[f64]) -> f64>(f: &F, rho: f64) -> f64 {
    f(&[rho]) + f(&[-rho])
}

/// `A(ρ)` in two dimensions, using `F(h) = F(-h)`.
pub(crate) fn average_2d<F: Fn(&[f64]) -> f64>(f: &F, kinks: &[Vec<f64>], rho: f64) -> f64 {
    2.0 * circle_integral(f, &kinks[0], &kinks[1], rho, None, true)
}

/// `A(ρ)` in three dimensions over the upper hemisphere, using `F(h) = F(-h)`.
pub(crate) fn average_3d<F: Fn(&[f64]) -> f64>(f: &F, kinks: &[Vec<f64>], rho: f64, tol: f64) -> Result<f64> {
    let (kx, ky, kz) = (&kinks[0], &kinks[1], &kinks[2]);
    let mut b = Vec::new();
    for &c in kz {
        if c > 0.0 && c < rho {
            b.push((c / rho).acos());
        }
    }
    // radii in the xy-plane where the circle slices change structure
    let mut radii: Vec<f64> = kx.iter().chain(ky).copied().collect();
    for &cx in kx {
        for &cy in ky {
            radii.push(cx.hypot(cy));
        }
    }
    for s in radii {
        if s > 0.0 && s < rho {
            b.push((s / rho).asin());
        }
    }
    let b = sorted_breaks(b, 0.0, FRAC_PI_2);
    let spec = QuadratureSpec { abs_tol: tol * rho.powi(3).max(1e-300), rel_tol: tol, max_subdivisions: 400, endpoint_exponent: 0.0 };
    let mut acc = 0.0;
    for w in b.windows(2) {
        let g = |theta: f64| {
            let (s, c) = theta.sin_cos();
            s * circle_integral(f, kx, ky, rho * s, Some(rho * c), false)
        };
        let est = match integrate_1d(g, w[0], w[1], &spec) {
            Ok(e) => e,
            Err(crate::Error::ConvergenceFailure { best, .. }) => best,
            Err(e) => return Err(e),
        };
        acc += est.value;
    }
    Ok(2.0 * acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_deficit_gives_sphere_area() {
        let one = |_: &[f64]| 1.0;
        assert!((average_1d(&one, 0.3) - 2.0).abs() < 1e-15);
        let k = vec![vec![0.2, 0.5], vec![0.1]];
        assert!((average_2d(&one, &k, 0.7) - 2.0 * PI).abs() < 1e-13);
        let k3 = vec![vec![0.2], vec![0.4], vec![0.3]];
        assert!((average_3d(&one, &k3, 0.7, 1e-12).unwrap() - 4.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn absolute_coordinate_averages() {
        // ∫_{S^1} |cos θ| = 4, ∫_{S^2} |z| = 2π
        let k = vec![vec![0.0], vec![0.0]];
        let fx = |h: &[f64]| h[0].abs();
        assert!((average_2d(&fx, &k, 1.0) - 4.0).abs() < 1e-13);
        let k3 = vec![vec![0.0], vec![0.0], vec![0.0]];
        let fz = |h: &[f64]| h[2].abs();
        assert!((average_3d(&fz, &k3, 1.0, 1e-12).unwrap() - 2.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn kinked_integrand_is_integrated_exactly() {
        // F = max(0, |h_x| - c) on the circle of radius 1:
        // 4 ∫_0^{acos c} (cos θ - c) dθ = 4 (sqrt(1 - c²) - c acos c)
        let c: f64 = 0.37;
        let k = vec![vec![c], vec![]];
        let f = |h: &[f64]| (h[0].abs() - c).max(0.0);
        let exact = 4.0 * ((1.0 - c * c).sqrt() - c * c.acos());
        assert!((average_2d(&f, &k, 1.0) - exact).abs() < 1e-13);
    }
}
