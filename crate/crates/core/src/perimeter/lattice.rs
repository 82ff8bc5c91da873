//! `∫ T(h) |h|^{-n-α} dh` for a function `T` given by multilinear
//! interpolation of an [`OffsetTable`] with `T(0) = 0`.
//!
//! The integral is a weighted sum of table entries. The weight of a node is
//! the kernel integrated against its hat function, cell by cell: tensor Gauss
//! rules away from the origin, and a cone decomposition for the cell at the
//! origin where the radial part integrates in closed form. Beyond the table
//! `T` equals its outside value, whose kernel mass over the complement of the
//! table box is again reduced to integrals over the box faces.

use std::sync::{Arc, Mutex};

use crate::estimate::Estimate;
use crate::geometry::OffsetTable;
use crate::numerics::gauss_rule;

/// Relative accuracy of the node weights, checked against closed forms.
const WEIGHT_REL_ERROR: f64 = 1e-10;

struct Weights {
    key: (Vec<u64>, Vec<usize>, u64),
    /// Per positive-orthant cell, one weight per corner (bit i set = upper corner on axis i).
    cells: Vec<f64>,
    outer: f64,
}

fn cache() -> &'static Mutex<Vec<Arc<Weights>>> {
    static CACHE: Mutex<Vec<Arc<Weights>>> = Mutex::new(Vec::new());
    &CACHE
}

const CACHE_SIZE: usize = 12;

fn weights_for(unit_spacing: &[f64], half: &[usize], alpha: f64) -> Arc<Weights> {
    let key = (unit_spacing.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), half.to_vec(), alpha.to_bits());
    if let Some(w) = cache().lock().unwrap().iter().find(|w| w.key == key) {
        return Arc::clone(w);
    }
    let w = Arc::new(compute_weights(unit_spacing, half, alpha, key));
    let mut c = cache().lock().unwrap();
    if c.len() >= CACHE_SIZE {
        c.remove(0);
    }
    c.push(Arc::clone(&w));
    w
}

fn order_for(dist: f64) -> usize {
    match dist {
        d if d < 1.5 => 16,
        d if d < 3.0 => 10,
        d if d < 6.0 => 8,
        d if d < 12.0 => 6,
        d if d < 24.0 => 4,
        d if d < 64.0 => 3,
        _ => 2,
    }
}

/// Coefficients of `∏_k (b_k ? v_k t : 1 - v_k t)` in powers of `t`.
fn hat_polynomial(v: &[f64], bits: usize, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    for (k, &vk) in v.iter().enumerate() {
        let (a, c) = if bits >> k & 1 == 1 { (0.0, vk) } else { (1.0, -vk) };
        out.push(0.0);
        for m in (0..out.len()).rev() {
            let lower = if m > 0 { out[m - 1] } else { 0.0 };
            out[m] = a * out[m] + c * lower;
        }
    }
}

/// Iterates `f` over the nodes of a tensor Gauss rule on `∏[0, len_k]`.
fn tensor_rule(lens: &[f64], order: usize, mut f: impl FnMut(&[f64], f64)) {
    let rule = gauss_rule(order);
    let d = lens.len();
    let nodes: Vec<Vec<(f64, f64)>> = lens.iter().map(|&l| rule.mapped(0.0, l).collect()).collect();
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for k in 0..d {
            let (xk, wk) = nodes[k][idx[k]];
            x[k] = xk;
            w *= wk;
        }
        f(&x, w);
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            return;
        }
    }
}

fn compute_weights(spacing: &[f64], half: &[usize], alpha: f64, key: (Vec<u64>, Vec<usize>, u64)) -> Weights {
    let n = spacing.len();
    let corners = 1usize << n;
    let ncells: usize = half.iter().product();
    let mut cells = vec![0.0; ncells * corners];
    let dmax = spacing.iter().cloned().fold(0.0, f64::max);
    let expo = -(n as f64) - alpha;

    let mut m = vec![0usize; n];
    let mut poly = Vec::with_capacity(n + 1);
    let mut u = vec![0.0; n];
    for cell in 0..ncells {
        // odometer decode, last axis fastest
        let mut rem = cell;
        for k in (0..n).rev() {
            m[k] = rem % half[k];
            rem /= half[k];
        }
        let w = &mut cells[cell * corners..(cell + 1) * corners];
        if m.iter().all(|&x| x == 0) {
            // cone decomposition over the far faces u_i = 1 of the origin cell
            for i in 0..n {
                let face_lens: Vec<f64> = (0..n).filter(|&k| k != i).map(|_| 1.0).collect();
                let face_area: f64 = (0..n).filter(|&k| k != i).map(|k| spacing[k]).product();
                let mut body = |y: &[f64], wt: f64| {
                    let mut j = 0;
                    let mut r2 = 0.0;
                    for k in 0..n {
                        u[k] = if k == i {
                            1.0
                        } else {
                            j += 1;
                            y[j - 1]
                        };
                        r2 += (u[k] * spacing[k]).powi(2);
                    }
                    let kern = r2.powf(0.5 * expo) * spacing[i] * face_area * wt;
                    for (b, wb) in w.iter_mut().enumerate().skip(1) {
                        hat_polynomial(&u, b, &mut poly);
                        let s: f64 = poly.iter().enumerate().skip(1).map(|(p, c)| c / (p as f64 - alpha)).sum();
                        *wb += kern * s;
                    }
                };
                if n == 1 {
                    body(&[], 1.0);
                } else {
                    tensor_rule(&face_lens, 16, &mut body);
                }
            }
        } else {
            let dist = m.iter().zip(spacing).map(|(&mk, &d)| (mk as f64 * d).powi(2)).sum::<f64>().sqrt() / dmax;
            let vol: f64 = spacing.iter().product();
            let ones = vec![1.0; n];
            tensor_rule(&ones, order_for(dist), |y, wt| {
                let mut r2 = 0.0;
                for k in 0..n {
                    r2 += ((m[k] as f64 + y[k]) * spacing[k]).powi(2);
                }
                let kern = r2.powf(0.5 * expo) * vol * wt;
                for (b, wb) in w.iter_mut().enumerate() {
                    let mut phi = 1.0;
                    for k in 0..n {
                        phi *= if b >> k & 1 == 1 { y[k] } else { 1.0 - y[k] };
                    }
                    *wb += kern * phi;
                }
            });
        }
    }
    let outer = outer_mass(spacing, half, alpha);
    Weights { key, cells, outer }
}

/// `∫_{|h_i| > a_i for some i} |h|^{-n-α} dh` with `a_i = half_i · spacing_i`.
fn outer_mass(spacing: &[f64], half: &[usize], alpha: f64) -> f64 {
    let n = spacing.len();
    let a: Vec<f64> = spacing.iter().zip(half).map(|(d, &h)| d * h as f64).collect();
    let expo = -(n as f64) - alpha;
    let mut total = 0.0;
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
        // face {p_i = a_i, 0 ≤ p_k ≤ a_k}, split into panels no wider than a_i / 2
        let panels: Vec<usize> = others.iter().map(|&k| ((2.0 * a[k] / a[i]).ceil() as usize).max(1)).collect();
        let mut face = 0.0;
        let count: usize = panels.iter().product();
        for p in 0..count {
            let mut rem = p;
            let mut lo = vec![0.0; others.len()];
            let mut len = vec![0.0; others.len()];
            for (j, &k) in others.iter().enumerate() {
                let idx = rem % panels[j];
                rem /= panels[j];
                len[j] = a[k] / panels[j] as f64;
                lo[j] = idx as f64 * len[j];
            }
            if others.is_empty() {
                face += a[i].powf(expo);
                continue;
            }
            tensor_rule(&len, 12, |y, wt| {
                let mut r2 = a[i] * a[i];
                for j in 0..y.len() {
                    r2 += (lo[j] + y[j]).powi(2);
                }
                face += wt * r2.powf(0.5 * expo);
            });
        }
        total += 2.0 * a[i] * 2f64.powi(n as i32 - 1) * face;
    }
    total / alpha
}

/// `∫ T(h) |h|^{-n-α} dh` for the multilinear interpolant of `table`.
pub(crate) fn table_integral(table: &OffsetTable, alpha: f64) -> Estimate {
    let n = table.dim();
    let spacing = table.spacing();
    let half = table.half();
    let s0 = spacing[0];
    let unit: Vec<f64> = spacing.iter().map(|d| d / s0).collect();
    let w = weights_for(&unit, half, alpha);
    let corners = 1usize << n;

    // cells j ∈ ∏[-N_k, N_k - 1]; reflect onto the positive orthant
    let full: Vec<usize> = half.iter().map(|&h| 2 * h).collect();
    let ncells: usize = full.iter().product();
    let orth_strides = {
        let mut s = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * half[k + 1];
        }
        s
    };
    let mut j = vec![0i64; n];
    let mut node = vec![0i64; n];
    let mut sum = 0.0;
    for cell in 0..ncells {
        let mut rem = cell;
        for k in (0..n).rev() {
            j[k] = (rem % full[k]) as i64 - half[k] as i64;
            rem /= full[k];
        }
        let mut oc = 0;
        let mut flip = 0usize;
        for k in 0..n {
            let mk = if j[k] >= 0 { j[k] as usize } else { flip |= 1 << k; (-j[k] - 1) as usize };
            oc += mk * orth_strides[k];
        }
        let cw = &w.cells[oc * corners..(oc + 1) * corners];
        for b in 0..corners {
            let wb = cw[b ^ flip];
            if wb == 0.0 {
                continue;
            }
            for k in 0..n {
                node[k] = j[k] + (b >> k & 1) as i64;
            }
            sum += wb * table.at(&node);
        }
    }
    let value = (sum + table.outside() * w.outer) * s0.powf(-alpha);
    Estimate::quadrature(value, WEIGHT_REL_ERROR * value.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_1d, QuadratureSpec};

    #[test]
    fn hat_polynomial_expansion() {
        let mut p = Vec::new();
        // (1 - 0.5 t)(0.25 t) = 0.25 t - 0.125 t²
        hat_polynomial(&[0.5, 0.25], 0b10, &mut p);
        assert_eq!(p.len(), 3);
        assert!((p[0]).abs() < 1e-16 && (p[1] - 0.25).abs() < 1e-16 && (p[2] + 0.125).abs() < 1e-16);
    }

    #[test]
    fn outer_mass_matches_polar_integral() {
        // ∫ outside [-a,a]×[-b,b] of |h|^{-2-α} = (1/α) ∫_0^{2π} r(θ)^{-α} dθ
        let (a, b, alpha) = (1.0f64, 1.5f64, 0.4);
        let spec = QuadratureSpec::with_tol(1e-14, 1e-13);
        let r = |t: f64| (a / t.cos().abs()).min(b / t.sin().abs());
        let corner = (b / a).atan();
        let q1 = integrate_1d(|t| r(t).powf(-alpha), 0.0, corner, &spec).unwrap().value
            + integrate_1d(|t| r(t).powf(-alpha), corner, std::f64::consts::FRAC_PI_2, &spec).unwrap().value;
        let exact = 4.0 * q1 / alpha;
        let got = outer_mass(&[0.5, 0.5], &[2, 3], alpha);
        assert!((got - exact).abs() < 1e-11 * exact, "{got} vs {exact}");
        let got1 = outer_mass(&[0.25], &[4], alpha);
        assert!((got1 - 2.0 / alpha).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_hat_table() {
        // T(h) = min(|h|, 1) on spacing 1/4: ∫ T |h|^{-1-α} = 2/(1-α) + 2/α
        let alpha = 0.3;
        let half = 8usize;
        let values: Vec<f64> = (-(half as i64)..=half as i64).map(|k| (k.abs() as f64 * 0.25).min(1.0)).collect();
        let t = OffsetTable::new(vec![0.25], vec![half], values, 1.0);
        let got = table_integral(&t, alpha).value;
        let exact = 2.0 / (1.0 - alpha) + 2.0 / alpha;
        assert!((got - exact).abs() < 1e-12 * exact, "{got} vs {exact}");
    }
}
