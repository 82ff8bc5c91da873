use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::constants::unit_ball_volume;
use crate::numerics::GaussRule;

fn cap_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(48))
}

/// `V(B_r ∩ (B_r + h))` at distance `d = |h|`.
pub(crate) fn lens_volume(n: usize, r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    match n {
        1 => 2.0 * r - d,
        2 => 2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt(),
        3 => PI / 12.0 * (4.0 * r + d) * (2.0 * r - d).powi(2),
        _ => {
            // two caps of height r - d/2; x = r cos φ
            let phi_max = (d / (2.0 * r)).acos();
            let s: f64 = cap_rule().integrate(0.0, phi_max, |p| p.sin().powi(n as i32));
            2.0 * unit_ball_volume(n - 1) * r.powi(n as i32) * s
        }
    }
}

/// `V(B_r) - V(B_r ∩ (B_r + h))`, evaluated without cancellation.
pub(crate) fn lens_deficit(n: usize, r: f64, d: f64) -> f64 {
    let vol = unit_ball_volume(n) * r.powi(n as i32);
    if d >= 2.0 * r {
        return vol;
    }
    match n {
        1 => d,
        2 => 2.0 * r * r * (d / (2.0 * r)).asin() + 0.5 * d * (4.0 * r * r - d * d).sqrt(),
        3 => PI * d * (r * r - d * d / 12.0),
        _ => {
            let psi_max = (d / (2.0 * r)).asin();
            let s: f64 = cap_rule().integrate(0.0, psi_max, |p| p.cos().powi(n as i32));
            2.0 * unit_ball_volume(n - 1) * r.powi(n as i32) * s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_plus_deficit_is_volume() {
        for n in 1..=8 {
            let vol = unit_ball_volume(n) * 1.3f64.powi(n as i32);
            for &d in &[0.0, 0.01, 0.5, 1.3, 2.0, 2.59, 3.0] {
                let sum = lens_volume(n, 1.3, d) + lens_deficit(n, 1.3, d);
                assert!((sum - vol).abs() < 1e-12 * vol, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn closed_forms_agree_with_cap_integral() {
        // the generic cap integral is valid for every n; compare on n = 2, 3
        for n in [2usize, 3] {
            for &d in &[0.1, 0.7, 1.5] {
                let phi_max = (d / 2.0f64).acos();
                let s = cap_rule().integrate(0.0, phi_max, |p| p.sin().powi(n as i32));
                let generic = 2.0 * unit_ball_volume(n - 1) * s;
                assert!((generic - lens_volume(n, 1.0, d)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn unit_disk_lens_at_unit_distance() {
        let exact = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_volume(2, 1.0, 1.0) - exact).abs() < 1e-14);
    }
}
