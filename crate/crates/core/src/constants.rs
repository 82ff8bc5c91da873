//! Geometric constants: unit-ball volumes, the angular constant `τ_n`, the
//! sharp Sobolev constant `κ_{n,α}` and exact kernel tails.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Ambient dimension `n` and fractional order `α` of every kernel `|h|^{-n-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaContext {
    n: usize,
    alpha: f64,
}

impl AlphaContext {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return invalid(format!("dimension {n} outside 1..={MAX_DIM}"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return invalid(format!("alpha {alpha} outside (0, 1)"));
        }
        Ok(AlphaContext { n, alpha })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dimension as a float, for exponent arithmetic.
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// The critical exponent `q = n / (n - α)`.
    pub fn q(&self) -> f64 {
        self.nf() / (self.nf() - self.alpha)
    }

    /// Scaling exponent `n - α` of perimeters and capacities.
    pub fn homogeneity(&self) -> f64 {
        self.nf() - self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        AlphaContext::new(self.n, alpha)
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments (Lanczos, g = 7, with reflection).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Volume `ω_n = π^{n/2} / Γ(n/2 + 1)` of the unit ball; `ω_0 = 1`.
/// Evaluated by the recursion `ω_n = 2π/n · ω_{n-2}`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut w = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = 2 + n % 2;
    while k <= n {
        w *= 2.0 * PI / k as f64;
        k += 2;
    }
    w
}

/// Surface area `n ω_n` of the unit sphere `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// `τ_n = ∫_{S^{n-1}} |cos θ| dσ = 2 ω_{n-1}`. For `n = 1` the sphere is
/// `{-1, 1}` with counting measure and `τ_1 = 2`.
pub fn tau(n: usize) -> f64 {
    assert!(n >= 1, "tau needs n >= 1");
    2.0 * unit_ball_volume(n - 1)
}

/// `κ_{n,α} = ω_n^{(n-α)/n} / (2 P_α(B^n))`, given an estimate of `P_α(B^n)`.
pub fn kappa(ctx: &AlphaContext, p_ball: f64) -> Result<f64> {
    if !(p_ball > 0.0) || !p_ball.is_finite() {
        return invalid(format!("P_alpha(ball) must be positive, got {p_ball}"));
    }
    let wn = unit_ball_volume(ctx.n());
    Ok(wn.powf(ctx.homogeneity() / ctx.nf()) / (2.0 * p_ball))
}

/// `∫_{|h| > R} |h|^{-n-α} dh = n ω_n R^{-α} / α`.
pub fn kernel_tail(ctx: &AlphaContext, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return invalid(format!("tail radius must be positive, got {radius}"));
    }
    Ok(sphere_area(ctx.n()) * radius.powf(-ctx.alpha()) / ctx.alpha())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn gamma_matches_factorials_and_half_integers() {
        let mut fact = 1.0;
        for k in 1..20 {
            assert!(close(gamma(k as f64), fact, 1e-13), "Γ({k})");
            fact *= k as f64;
        }
        assert!(close(gamma(0.5), PI.sqrt(), 1e-14));
        assert!(close(gamma(1.5), PI.sqrt() / 2.0, 1e-14));
        assert!(close(gamma(0.25), 3.625_609_908_221_908, 1e-13));
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert!(close(unit_ball_volume(1), 2.0, 1e-15));
        assert!(close(unit_ball_volume(2), PI, 1e-15));
        assert!(close(unit_ball_volume(3), 4.0 * PI / 3.0, 1e-15));
        for n in 0..=MAX_DIM {
            let h = n as f64 / 2.0;
            let direct = PI.powf(h) / gamma(h + 1.0);
            assert!(close(unit_ball_volume(n), direct, 1e-13), "n = {n}");
        }
    }

    #[test]
    fn tau_small_dimensions() {
        assert_eq!(tau(1), 2.0);
        assert!(close(tau(2), 4.0, 1e-15));
        assert!(close(tau(3), 2.0 * PI, 1e-14));
    }

    #[test]
    fn context_rejects_bad_input() {
        assert!(AlphaContext::new(0, 0.5).is_err());
        assert!(AlphaContext::new(17, 0.5).is_err());
        assert!(AlphaContext::new(2, 0.0).is_err());
        assert!(AlphaContext::new(2, 1.0).is_err());
        assert!(AlphaContext::new(2, f64::NAN).is_err());
        let ctx = AlphaContext::new(1, 0.5).unwrap();
        assert_eq!(ctx.q(), 2.0);
    }

    #[test]
    fn kappa_interval_closed_form() {
        let ctx = AlphaContext::new(1, 0.5).unwrap();
        let k = kappa(&ctx, 8.0 * 2f64.sqrt()).unwrap();
        assert!(close(k, 0.0625, 1e-15));
        let k2 = kappa(&ctx, 16.0 * 2f64.sqrt()).unwrap();
        assert!(close(k2, k / 2.0, 1e-15));
        assert!(kappa(&ctx, 0.0).is_err());
        assert!(kappa(&ctx, -1.0).is_err());
    }

    #[test]
    fn kappa_rescaled_limit_n1() {
        // κ_{1,α} = α(1-α)/4 from P_α((-1,1)) = 2^{2-α}/(α(1-α)); κ/(1-α) → 1/4
        for &a in &[0.99, 0.999, 0.9999] {
            let ctx = AlphaContext::new(1, a).unwrap();
            let p = 2f64.powf(2.0 - a) / (a * (1.0 - a));
            let k = kappa(&ctx, p).unwrap();
            assert!(close(k, a * (1.0 - a) / 4.0, 1e-12));
            assert!((k / (1.0 - a) - 0.25).abs() < 1.01 * (1.0 - a) / 4.0);
        }
    }

    #[test]
    fn kernel_tail_values() {
        let c1 = AlphaContext::new(1, 0.5).unwrap();
        assert!(close(kernel_tail(&c1, 1.0).unwrap(), 4.0, 1e-15));
        let c2 = AlphaContext::new(2, 0.5).unwrap();
        assert!(close(kernel_tail(&c2, 4.0).unwrap(), 2.0 * PI, 1e-14));
        assert!(kernel_tail(&c2, 0.0).is_err());
        assert!(kernel_tail(&c2, 1e300).unwrap() < 1e-140);
        for &r in &[0.1, 1.0, 7.0, 1e3] {
            let v = kernel_tail(&c2, r).unwrap() * r.powf(0.5);
            assert!(close(v, 4.0 * PI, 1e-12));
        }
    }
}
