//! The Besov seminorm `‖f‖ = ∫ ∫ |f(x+h) - f(x)| dx |h|^{-n-α} dh` of grid
//! functions, their superlevel sets and the co-area decomposition
//! `‖f‖ = 2 ∫_0^∞ P_α({|f| > t}) dt`.
//!
//! Grid functions are constant on cells, so `D_f(h) = ∫ |f(x+h) - f(x)| dx`
//! is exactly the multilinear interpolation of its values at lattice
//! offsets, and every superlevel set is a union of cells.

mod builders;
mod function;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use builders::{build_cutoff, bump, tent, MIN_CELLS_PER_EPS};
pub use function::SampledFunction;

use crate::constants::{sphere_area, AlphaContext};
use crate::error::{invalid, Error, Result};
use crate::estimate::Estimate;
use crate::geometry::{OffsetTable, Shape};
use crate::numerics::gauss_rule;
use crate::perimeter::{frac_perimeter, lattice::table_integral, PerimeterSpec};

/// `D_k = δ^n Σ_j |f_{j+k} - f_j|` for one lattice offset `k`, with `f`
/// extended by zero.
fn diff_at(f: &SampledFunction, k: &[i64]) -> f64 {
    let n = f.dim();
    let ext = f.extents();
    let strides = f.strides();
    let vals = f.values();
    let l1: f64 = vals.iter().map(|v| v.abs()).sum();
    // overlap box: j with j and j + k both on the grid
    let mut lo = vec![0usize; n];
    let mut cnt = vec![0usize; n];
    for i in 0..n {
        let e = ext[i] as i64;
        let a = 0.max(-k[i]);
        let b = e.min(e - k[i]);
        if b <= a {
            return 2.0 * l1 * f.cell_volume();
        }
        lo[i] = a as usize;
        cnt[i] = (b - a) as usize;
    }
    let shift: i64 = (0..n).map(|i| k[i] * strides[i] as i64).sum();
    let row = cnt[n - 1];
    let rows: usize = cnt[..n - 1].iter().product();
    let mut idx = vec![0usize; n.saturating_sub(1)];
    let (mut diff, mut base, mut moved) = (0.0, 0.0, 0.0);
    for _ in 0..rows {
        let mut start = lo[n - 1];
        for i in 0..n - 1 {
            start += (lo[i] + idx[i]) * strides[i];
        }
        let other = (start as i64 + shift) as usize;
        let a = &vals[start..start + row];
        let b = &vals[other..other + row];
        for (x, y) in a.iter().zip(b) {
            diff += (y - x).abs();
            base += x.abs();
            moved += y.abs();
        }
        for i in (0..n - 1).rev() {
            idx[i] += 1;
            if idx[i] < cnt[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    // cells whose partner falls off the grid contribute |f| once each
    (diff + (l1 - base) + (l1 - moved)) * f.cell_volume()
}

/// Table of `D_f` at all lattice offsets `k ∈ ∏[-N_i, N_i]`, `N_i` the extents.
pub fn diff_table(f: &SampledFunction) -> OffsetTable {
    let n = f.dim();
    let half: Vec<usize> = f.extents().to_vec();
    let widths: Vec<usize> = half.iter().map(|h| 2 * h + 1).collect();
    let total: usize = widths.iter().product();
    let decode = |mut flat: usize| {
        let mut k = vec![0i64; n];
        for i in (0..n).rev() {
            k[i] = (flat % widths[i]) as i64 - half[i] as i64;
            flat /= widths[i];
        }
        k
    };
    // D_{-k} = D_k: the flat index of -k is total - 1 - flat
    let mid = total / 2;
    let mut values: Vec<f64> = (0..=mid).into_par_iter().map(|flat| diff_at(f, &decode(flat))).collect();
    values.resize(total, 0.0);
    for flat in mid + 1..total {
        values[flat] = values[total - 1 - flat];
    }
    values[mid] = 0.0;
    let outside = 2.0 * f.lp_norm(1.0).unwrap_or(0.0);
    OffsetTable::new(f.spacing().to_vec(), half, values, outside)
}

/// `∫ |f(x+h) - f(x)| dx`.
pub fn diff_volume(f: &SampledFunction, h: &[f64]) -> Result<f64> {
    let n = f.dim();
    if h.len() != n {
        return invalid(format!("offset has dimension {} but function has {n}", h.len()));
    }
    // multilinear interpolation between the 2^n surrounding lattice offsets
    let mut base = vec![0i64; n];
    let mut frac = vec![0.0; n];
    for i in 0..n {
        let x = h[i] / f.spacing()[i];
        let t = x.trunc();
        base[i] = t as i64;
        frac[i] = x - t;
    }
    let mut acc = 0.0;
    let mut k = vec![0i64; n];
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        for i in 0..n {
            let up = corner >> i & 1 == 1;
            let step = if frac[i] < 0.0 { -1 } else { 1 };
            k[i] = base[i] + if up { step } else { 0 };
            w *= if up { frac[i].abs() } else { 1.0 - frac[i].abs() };
        }
        if w != 0.0 {
            acc += w * diff_at(f, &k);
        }
    }
    Ok(acc)
}

/// `‖f‖_{Λ̇_α^{1,1}}`.
///
/// The lattice sum is exact for the cellwise-constant function. The error
/// field additionally carries the total-variation bound
/// `TV(f) · n ω_n δ^{1-α} / (1-α)` on the offsets shorter than one cell,
/// where a smooth `f` and its cellwise sampling differ most.
pub fn besov_seminorm(f: &SampledFunction, ctx: &AlphaContext) -> Result<Estimate> {
    if f.dim() != ctx.n() {
        return invalid(format!("function has dimension {} but context has n = {}", f.dim(), ctx.n()));
    }
    if f.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let est = table_integral(&diff_table(f), ctx.alpha());
    let delta = f.spacing().iter().cloned().fold(0.0, f64::max);
    let a = ctx.alpha();
    let credit = f.total_variation() * sphere_area(ctx.n()) * delta.powf(1.0 - a) / (1.0 - a);
    Ok(Estimate::quadrature(est.value, est.error + credit))
}

/// A superlevel set, which may be empty.
#[derive(Debug, Clone)]
pub enum LevelSet {
    Empty,
    Set(Shape),
}

impl LevelSet {
    pub fn shape(&self) -> Option<&Shape> {
        match self {
            LevelSet::Empty => None,
            LevelSet::Set(s) => Some(s),
        }
    }

    pub fn volume(&self) -> f64 {
        self.shape().and_then(Shape::exact_volume).unwrap_or(0.0)
    }
}

/// `{|f| > t}` as a union of grid cells.
pub fn superlevel_set(f: &SampledFunction, t: f64) -> Result<LevelSet> {
    if !(t > 0.0) {
        return invalid(format!("superlevel sets need t > 0, got {t}"));
    }
    Ok(match f.shape_from_mask(f.mask_above(t)) {
        Some(s) => LevelSet::Set(s),
        None => LevelSet::Empty,
    })
}

/// How the level integral over `t ∈ (0, max |f|)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelRule {
    /// Gauss–Legendre with this many levels; the error compares against half as many.
    Gauss(usize),
    /// One term per distinct value of `|f|`, on which the level set is constant.
    Exact,
}

impl Default for LevelRule {
    fn default() -> Self {
        LevelRule::Gauss(64)
    }
}

/// Most distinct values for which [`LevelRule::for_function`] picks the exact rule.
pub const EXACT_LEVELS_MAX: usize = 1024;

/// Number of distinct nonzero values of `|f|`.
pub fn distinct_levels(f: &SampledFunction) -> usize {
    let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    levels.len()
}

impl LevelRule {
    /// Exact when `f` takes at most [`EXACT_LEVELS_MAX`] values, Gauss otherwise.
    pub fn for_function(f: &SampledFunction) -> LevelRule {
        if distinct_levels(f) <= EXACT_LEVELS_MAX {
            LevelRule::Exact
        } else {
            LevelRule::default()
        }
    }
}

/// `∫_0^∞ g(t, {|f| > t}) d(t^q)`, with `g` evaluated on nonempty level sets only.
pub fn level_integral<G>(f: &SampledFunction, rule: LevelRule, q: f64, g: G) -> Result<Estimate>
where
    G: Fn(f64, &Shape) -> Result<Estimate> + Sync,
{
    if !(q >= 1.0) {
        return invalid("level integral needs q >= 1");
    }
    let top = f.max_abs();
    if top == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let eval = |t: f64| -> Result<Estimate> {
        match superlevel_set(f, t)? {
            LevelSet::Empty => Ok(Estimate::exact(0.0)),
            LevelSet::Set(s) => g(t, &s),
        }
    };
    let gather = |pts: Vec<(f64, f64)>| -> Result<Estimate> {
        let parts: Vec<Result<Estimate>> = pts.par_iter().map(|&(t, w)| Ok(eval(t)?.scaled(w))).collect();
        let mut acc = Estimate::exact(0.0);
        let mut failed = false;
        for p in parts {
            match p {
                Ok(e) => acc = acc.plus(e),
                Err(Error::ConvergenceFailure { best, .. }) => {
                    failed = true;
                    acc = acc.plus(best);
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            return Err(Error::ConvergenceFailure { message: "level integral".into(), best: acc });
        }
        Ok(acc)
    };
    match rule {
        LevelRule::Exact => {
            let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            let mut pts = Vec::with_capacity(levels.len());
            let mut prev = 0.0f64;
            for &u in &levels {
                // the set {|f| > t} is {|f| ≥ u} for t ∈ [prev, u)
                let w = u.powf(q) - prev.powf(q);
                let t = if prev > 0.0 { prev } else { 0.5 * u };
                pts.push((t, w));
                prev = u;
            }
            let est = gather(pts)?;
            Ok(Estimate { method: if est.method == crate::Method::Exact { crate::Method::Quadrature } else { est.method }, ..est })
        }
        LevelRule::Gauss(m) => {
            if !(2..=64).contains(&m) {
                return invalid("Gauss level rule needs 2..=64 levels");
            }
            let nodes = |order: usize| -> Vec<(f64, f64)> {
                gauss_rule(order).mapped(0.0, top).map(|(t, w)| (t, w * q * t.powf(q - 1.0))).collect()
            };
            let fine = gather(nodes(m))?;
            let coarse = gather(nodes(m / 2))?;
            Ok(Estimate::quadrature(fine.value, fine.error + (fine.value - coarse.value).abs()).with_provenance(&fine))
        }
    }
}

/// `2 ∫_0^∞ P_α({|f| > t}) dt`.
pub fn coarea_decompose(f: &SampledFunction, ctx: &AlphaContext, rule: LevelRule, spec: &PerimeterSpec) -> Result<Estimate> {
    if f.dim() != ctx.n() {
        return invalid(format!("function has dimension {} but context has n = {}", f.dim(), ctx.n()));
    }
    Ok(level_integral(f, rule, 1.0, |_, s| frac_perimeter(s, ctx, spec))?.scaled(2.0))
}

#[cfg(test)]
mod tests;
