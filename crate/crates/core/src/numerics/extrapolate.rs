use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which end of `(0, 1)` a limit scan approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitEnd {
    Zero,
    One,
}

impl LimitEnd {
    /// Distance of `alpha` from this end.
    pub fn distance(self, alpha: f64) -> f64 {
        match self {
            LimitEnd::Zero => alpha,
            LimitEnd::One => 1.0 - alpha,
        }
    }

    pub fn default_grid(self) -> [f64; 3] {
        match self {
            LimitEnd::Zero => [0.02, 0.01, 0.005],
            LimitEnd::One => [0.98, 0.99, 0.995],
        }
    }

    /// Detects the end approached by a strictly monotone α grid.
    pub fn detect(alphas: &[f64]) -> Result<Self> {
        if alphas.len() < 2 {
            return invalid("a limit scan needs at least two α values");
        }
        let increasing = alphas.windows(2).all(|w| w[1] > w[0]);
        let decreasing = alphas.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return invalid("α grid must be strictly monotone");
        }
        let mean = alphas.iter().sum::<f64>() / alphas.len() as f64;
        let end = if mean < 0.5 { LimitEnd::Zero } else { LimitEnd::One };
        if alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return invalid("α grid must lie in (0, 1)");
        }
        Ok(end)
    }
}

/// Least-squares affine fit `value ≈ a + b·d(α)` where `d` is the distance
/// to the approached end; returns the intercept `a`.
pub fn extrapolate_limit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return invalid(format!("extrapolation needs at least 3 points, got {}", points.len()));
    }
    let alphas: Vec<f64> = points.iter().map(|p| p.0).collect();
    let end = LimitEnd::detect(&alphas)?;
    let m = points.len() as f64;
    let xs: Vec<f64> = alphas.iter().map(|&a| end.distance(a)).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, p) in xs.iter().zip(points) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (p.1 - ybar);
    }
    if sxx == 0.0 {
        return invalid("degenerate α grid");
    }
    let slope = sxy / sxx;
    Ok(ybar - slope * xbar)
}

/// Outcome of an α → 0 or α → 1 scan: the scaled values along the grid,
/// their extrapolated limit and the target it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitScanResult {
    pub alphas: Vec<f64>,
    pub scaled_values: Vec<f64>,
    pub extrapolated: f64,
    pub target: f64,
    pub rel_err: f64,
}

impl LimitScanResult {
    pub fn new(alphas: Vec<f64>, scaled_values: Vec<f64>, target: f64) -> Result<Self> {
        if alphas.len() != scaled_values.len() {
            return invalid("scan grid and values differ in length");
        }
        let pts: Vec<(f64, f64)> = alphas.iter().copied().zip(scaled_values.iter().copied()).collect();
        let extrapolated = extrapolate_limit(&pts)?;
        let rel_err = (extrapolated - target).abs() / target.abs();
        Ok(LimitScanResult { alphas, scaled_values, extrapolated, target, rel_err })
    }

    pub fn end(&self) -> LimitEnd {
        LimitEnd::detect(&self.alphas).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_affine_data() {
        let pts: Vec<_> = [0.02, 0.01, 0.005].iter().map(|&a| (a, 3.0 - 7.0 * a)).collect();
        assert!((extrapolate_limit(&pts).unwrap() - 3.0).abs() < 1e-12);
        let pts: Vec<_> = [0.98, 0.99, 0.995].iter().map(|&a| (a, -1.5 + 2.0 * (1.0 - a))).collect();
        assert!((extrapolate_limit(&pts).unwrap() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(extrapolate_limit(&[(0.1, 1.0), (0.05, 1.0)]).is_err());
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(extrapolate_limit(&[(0.1, 1.0), (0.05, 1.0), (0.2, 1.0)]).is_err());
    }

    #[test]
    fn interval_closed_forms() {
        // α P_α((0,1)) = 2/(1-α) and (1-α) P_α((0,1)) = 2/α
        let pts: Vec<_> = [0.02, 0.01, 0.005].iter().map(|&a| (a, 2.0 / (1.0 - a))).collect();
        assert!((extrapolate_limit(&pts).unwrap() - 2.0).abs() < 0.02);
        let pts: Vec<_> = [0.98, 0.99, 0.995].iter().map(|&a| (a, 2.0 / a)).collect();
        assert!((extrapolate_limit(&pts).unwrap() - 2.0).abs() < 0.02);
    }
}
