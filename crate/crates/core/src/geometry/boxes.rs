use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Closed axis-aligned box `∏ [lo_i, hi_i]` with `lo_i < hi_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return invalid(format!("box corners have dimensions {} and {}", lo.len(), hi.len()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return invalid(format!("box axis {i}: need lo < hi, got [{l}, {h}]"));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    pub(crate) fn new_unchecked(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert!(lo.iter().zip(&hi).all(|(l, h)| l < h));
        AxisBox { lo, hi }
    }

    /// `[0, 1]^n`.
    pub fn unit(n: usize) -> Self {
        AxisBox::new_unchecked(vec![0.0; n], vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).collect()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.lengths().iter().map(|l| l * l).sum::<f64>().sqrt()
    }

    pub fn surface_area(&self) -> f64 {
        let len = self.lengths();
        let n = len.len();
        if n == 1 {
            return 2.0;
        }
        (0..n)
            .map(|i| 2.0 * len.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l).product::<f64>())
            .sum()
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        let eps = 1e-12 * self.diameter();
        (0..self.dim()).all(|i| self.lo[i] <= other.lo[i] + eps && other.hi[i] <= self.hi[i] + eps)
    }

    /// Euclidean distance from `x` to the box.
    pub fn distance(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| {
                let d = (l - x).max(x - h).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// True when the open interiors intersect.
    pub fn interiors_overlap(&self, other: &AxisBox) -> bool {
        (0..self.dim()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }

    /// `V(self ∩ (other + h))`.
    pub fn overlap_shifted(&self, other: &AxisBox, h: &[f64]) -> f64 {
        let mut v = 1.0;
        for i in 0..self.dim() {
            // min(a, b) - max(c, d) as the smallest pairwise difference, with
            // coordinates subtracted first: touching faces then give exactly ±h
            let w = (self.hi[i] - self.lo[i])
                .min(other.hi[i] - other.lo[i])
                .min((self.hi[i] - other.lo[i]) - h[i])
                .min((other.hi[i] - self.lo[i]) + h[i]);
            if w <= 0.0 {
                return 0.0;
            }
            v *= w;
        }
        v
    }

    /// `V(B) - V(B ∩ (B + h))`, summed so that no cancellation occurs for small `h`.
    pub fn self_deficit(&self, h: &[f64]) -> f64 {
        let len = self.lengths();
        let n = len.len();
        if len.iter().zip(h).any(|(l, x)| x.abs() >= *l) {
            return self.volume();
        }
        // ∏L - ∏(L - x) = Σ_k ∏_{i<k}(L_i - x_i) · x_k · ∏_{i>k} L_i
        let mut acc = 0.0;
        let mut prefix = 1.0;
        for k in 0..n {
            let x = h[k].abs();
            let suffix: f64 = len[k + 1..].iter().product();
            acc += prefix * x * suffix;
            prefix *= len[k] - x;
        }
        acc
    }

    pub fn scaled(&self, r: f64) -> AxisBox {
        AxisBox::new_unchecked(self.lo.iter().map(|x| x * r).collect(), self.hi.iter().map(|x| x * r).collect())
    }

    pub fn translated(&self, v: &[f64]) -> AxisBox {
        AxisBox::new_unchecked(
            self.lo.iter().zip(v).map(|(x, d)| x + d).collect(),
            self.hi.iter().zip(v).map(|(x, d)| x + d).collect(),
        )
    }

    /// Grown by `s` on every side.
    pub fn expanded(&self, s: f64) -> AxisBox {
        AxisBox::new_unchecked(self.lo.iter().map(|x| x - s).collect(), self.hi.iter().map(|x| x + s).collect())
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &AxisBox) -> AxisBox {
        AxisBox::new_unchecked(
            self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        )
    }
}

/// True when the union of `cover` contains `target`.
pub(crate) fn boxes_cover(cover: &[AxisBox], target: &AxisBox) -> bool {
    let n = target.dim();
    let eps = 1e-12 * target.diameter().max(1e-300);
    let relevant: Vec<&AxisBox> = cover.iter().filter(|b| b.interiors_overlap(target)).collect();
    if relevant.is_empty() {
        return false;
    }
    // Coordinate compression restricted to the target.
    let mut coords: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut c = vec![target.lo[i], target.hi[i]];
        for b in &relevant {
            for x in [b.lo[i], b.hi[i]] {
                if x > target.lo[i] + eps && x < target.hi[i] - eps {
                    c.push(x);
                }
            }
        }
        c.sort_by(f64::total_cmp);
        c.dedup_by(|a, b| (*a - *b).abs() <= eps);
        coords.push(c);
    }
    let counts: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
    let mut idx = vec![0usize; n];
    let mut mid = vec![0.0; n];
    loop {
        for i in 0..n {
            mid[i] = 0.5 * (coords[i][idx[i]] + coords[i][idx[i] + 1]);
        }
        if !relevant.iter().any(|b| b.contains_point(&mid)) {
            return false;
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return true;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Greedily merges the set cells of a row-major boolean grid into disjoint
/// index boxes `[lo, hi)`.
pub(crate) fn merge_cells(extents: &[usize], mask: &[bool]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = extents.len();
    let total: usize = extents.iter().product();
    debug_assert_eq!(total, mask.len());
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * extents[i + 1];
    }
    let mut used = vec![false; total];
    let mut out = Vec::new();
    let free = |used: &[bool], lo: &[usize], hi: &[usize]| -> bool {
        // every cell in [lo, hi) set and unused
        let mut idx = lo.to_vec();
        loop {
            let flat: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            if !mask[flat] || used[flat] {
                return false;
            }
            let mut axis = n;
            loop {
                if axis == 0 {
                    return true;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < hi[axis] {
                    break;
                }
                idx[axis] = lo[axis];
            }
        }
    };
    for flat in 0..total {
        if !mask[flat] || used[flat] {
            continue;
        }
        let mut lo = vec![0usize; n];
        let mut rem = flat;
        for i in 0..n {
            lo[i] = rem / strides[i];
            rem %= strides[i];
        }
        let mut hi: Vec<usize> = lo.iter().map(|i| i + 1).collect();
        for axis in (0..n).rev() {
            while hi[axis] < extents[axis] {
                let mut slab_lo = lo.clone();
                let mut slab_hi = hi.clone();
                slab_lo[axis] = hi[axis];
                slab_hi[axis] = hi[axis] + 1;
                if free(&used, &slab_lo, &slab_hi) {
                    hi[axis] += 1;
                } else {
                    break;
                }
            }
        }
        // mark
        let mut idx = lo.clone();
        loop {
            let f: usize = idx.iter().zip(&strides).map(|(i, s)| i * s).sum();
            used[f] = true;
            let mut axis = n;
            let mut done = false;
            loop {
                if axis == 0 {
                    done = true;
                    break;
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < hi[axis] {
                    break;
                }
                idx[axis] = lo[axis];
            }
            if done {
                break;
            }
        }
        out.push((lo, hi));
    }
    out
}

/// Disjoint boxes whose union equals the union of `boxes`.
pub(crate) fn disjoint_union(boxes: &[AxisBox]) -> Vec<AxisBox> {
    if boxes.is_empty() {
        return Vec::new();
    }
    let n = boxes[0].dim();
    let mut coords: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut c: Vec<f64> = boxes.iter().flat_map(|b| [b.lo[i], b.hi[i]]).collect();
        c.sort_by(f64::total_cmp);
        c.dedup();
        coords.push(c);
    }
    let extents: Vec<usize> = coords.iter().map(|c| c.len() - 1).collect();
    let total: usize = extents.iter().product();
    let mut mask = vec![false; total];
    let mut idx = vec![0usize; n];
    let mut mid = vec![0.0; n];
    for cell in mask.iter_mut() {
        for i in 0..n {
            mid[i] = 0.5 * (coords[i][idx[i]] + coords[i][idx[i] + 1]);
        }
        *cell = boxes.iter().any(|b| b.contains_point(&mid));
        for axis in (0..n).rev() {
            idx[axis] += 1;
            if idx[axis] < extents[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
    merge_cells(&extents, &mask)
        .into_iter()
        .map(|(lo, hi)| {
            AxisBox::new_unchecked(
                (0..n).map(|i| coords[i][lo[i]]).collect(),
                (0..n).map(|i| coords[i][hi[i]]).collect(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(lo: &[f64], hi: &[f64]) -> AxisBox {
        AxisBox::new(lo.to_vec(), hi.to_vec()).unwrap()
    }

    #[test]
    fn invalid_boxes() {
        assert!(AxisBox::new(vec![0.0], vec![0.0]).is_err());
        assert!(AxisBox::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(AxisBox::new(vec![], vec![]).is_err());
    }

    #[test]
    fn self_deficit_matches_direct_formula() {
        let bx = b(&[0.0, 0.0, 0.0], &[1.0, 2.0, 0.5]);
        for h in [[0.1, -0.3, 0.2], [0.9, 1.9, 0.49], [0.0, 0.0, 0.0], [1.5, 0.0, 0.0]] {
            let direct = bx.volume() - bx.overlap_shifted(&bx, &h);
            assert!((bx.self_deficit(&h) - direct).abs() < 1e-14);
        }
        let tiny = [1e-200, 0.0, 0.0];
        assert!((bx.self_deficit(&tiny) / 1e-200 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn surface_areas() {
        assert_eq!(b(&[0.0, 0.0], &[1.0, 1.0]).surface_area(), 4.0);
        assert_eq!(b(&[0.0, 0.0, 0.0], &[1.0, 2.0, 3.0]).surface_area(), 22.0);
    }

    #[test]
    fn cover_check() {
        let target = b(&[0.0, 0.0], &[2.0, 1.0]);
        let halves = [b(&[0.0, 0.0], &[1.0, 1.0]), b(&[1.0, 0.0], &[2.0, 1.0])];
        assert!(boxes_cover(&halves, &target));
        assert!(!boxes_cover(&halves[..1], &target));
        let gap = [b(&[0.0, 0.0], &[0.9, 1.0]), b(&[1.0, 0.0], &[2.0, 1.0])];
        assert!(!boxes_cover(&gap, &target));
    }

    #[test]
    fn merge_cells_l_shape() {
        // 3x3 grid, L-shape: bottom row and left column
        let mask = [true, false, false, true, false, false, true, true, true];
        let boxes = merge_cells(&[3, 3], &mask);
        let cells: usize =
            boxes.iter().map(|(lo, hi)| lo.iter().zip(hi).map(|(l, h)| h - l).product::<usize>()).sum();
        assert_eq!(cells, 5);
        assert!(boxes.len() <= 3);
    }

    #[test]
    fn disjoint_union_preserves_volume() {
        let a = b(&[0.0, 0.0], &[2.0, 2.0]);
        let c = b(&[1.0, 1.0], &[3.0, 3.0]);
        let parts = disjoint_union(&[a, c]);
        let vol: f64 = parts.iter().map(|p| p.volume()).sum();
        assert!((vol - 7.0).abs() < 1e-12);
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                assert!(!parts[i].interiors_overlap(&parts[j]));
            }
        }
    }
}
