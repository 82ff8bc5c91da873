//! Regular-lattice sets and offset tables.
//!
//! For a union of lattice cells, or a function that is constant on lattice
//! cells, any translation-overlap quantity (covariogram, `∫|f(x+h)-f(x)|dx`)
//! is the multilinear interpolation of its values at lattice offsets. The
//! tables below store those values and interpolate them exactly.

use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Values of a centrally symmetric offset function at lattice offsets
/// `k ∈ ∏[-half_i, half_i]`, constant (`outside`) beyond.
#[derive(Debug, Clone)]
pub struct OffsetTable {
    spacing: Vec<f64>,
    half: Vec<usize>,
    values: Vec<f64>,
    outside: f64,
    strides: Vec<usize>,
}

impl OffsetTable {
    /// `values` is row-major over `∏[-half_i, half_i]`.
    pub fn new(spacing: Vec<f64>, half: Vec<usize>, values: Vec<f64>, outside: f64) -> Self {
        let n = half.len();
        let widths: Vec<usize> = half.iter().map(|h| 2 * h + 1).collect();
        assert_eq!(values.len(), widths.iter().product::<usize>());
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * widths[i + 1];
        }
        OffsetTable { spacing, half, values, outside, strides }
    }

    pub fn dim(&self) -> usize {
        self.half.len()
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn half(&self) -> &[usize] {
        &self.half
    }

    pub fn outside(&self) -> f64 {
        self.outside
    }

    /// Radius beyond which the table is constant.
    pub fn radius(&self) -> f64 {
        self.half.iter().zip(&self.spacing).map(|(h, d)| (*h as f64 * d).powi(2)).sum::<f64>().sqrt()
    }

    pub fn at(&self, k: &[i64]) -> f64 {
        let mut flat = 0usize;
        for i in 0..k.len() {
            let h = self.half[i] as i64;
            if k[i].abs() > h {
                return self.outside;
            }
            flat += (k[i] + h) as usize * self.strides[i];
        }
        self.values[flat]
    }

    /// Multilinear interpolation at offset `h`.
    ///
    /// Each axis interpolates between `trunc(x)` and `trunc(x) ± 1` so the
    /// weights stay exact for tiny offsets of either sign.
    pub fn interpolate(&self, h: &[f64]) -> f64 {
        let n = self.dim();
        let mut base = [0i64; 16];
        let mut step = [0i64; 16];
        let mut frac = [0f64; 16];
        for i in 0..n {
            let x = h[i] / self.spacing[i];
            if x.abs() >= self.half[i] as f64 {
                return self.outside;
            }
            let t = x.trunc();
            base[i] = t as i64;
            frac[i] = (x - t).abs();
            step[i] = if x < 0.0 { -1 } else { 1 };
        }
        let mut acc = 0.0;
        let mut k = [0i64; 16];
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            for i in 0..n {
                if corner >> i & 1 == 1 {
                    w *= frac[i];
                    k[i] = base[i] + step[i];
                } else {
                    w *= 1.0 - frac[i];
                    k[i] = base[i];
                }
            }
            if w != 0.0 {
                acc += w * self.at(&k[..n]);
            }
        }
        acc
    }

    /// Kink positions `|h_axis| = c` of the interpolant along `axis`.
    pub fn kinks(&self, axis: usize) -> Vec<f64> {
        (0..=self.half[axis]).map(|k| k as f64 * self.spacing[axis]).collect()
    }

    pub(crate) fn scaled(&self, r: f64, value_factor: f64) -> OffsetTable {
        OffsetTable {
            spacing: self.spacing.iter().map(|d| d * r).collect(),
            half: self.half.clone(),
            values: self.values.iter().map(|v| v * value_factor).collect(),
            outside: self.outside * value_factor,
            strides: self.strides.clone(),
        }
    }
}

/// A union of cells of a regular lattice.
#[derive(Debug, Clone)]
pub struct LatticeSet {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    extents: Vec<usize>,
    mask: Vec<bool>,
    table: Arc<OnceLock<OffsetTable>>,
}

impl LatticeSet {
    pub(crate) fn new(origin: Vec<f64>, spacing: Vec<f64>, extents: Vec<usize>, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), extents.iter().product::<usize>());
        LatticeSet { origin, spacing, extents, mask, table: Arc::new(OnceLock::new()) }
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn volume(&self) -> f64 {
        self.count() as f64 * self.cell_volume()
    }

    pub(crate) fn scaled(&self, r: f64) -> LatticeSet {
        let n = self.extents.len() as i32;
        let table = Arc::new(OnceLock::new());
        if let Some(t) = self.table.get() {
            let _ = table.set(t.scaled(r, r.powi(n)));
        }
        LatticeSet {
            origin: self.origin.iter().map(|x| x * r).collect(),
            spacing: self.spacing.iter().map(|d| d * r).collect(),
            extents: self.extents.clone(),
            mask: self.mask.clone(),
            table,
        }
    }

    pub(crate) fn translated(&self, v: &[f64]) -> LatticeSet {
        LatticeSet {
            origin: self.origin.iter().zip(v).map(|(x, d)| x + d).collect(),
            table: Arc::clone(&self.table),
            ..self.clone()
        }
    }

    /// Table of `V - V(E ∩ (E + h))` at lattice offsets.
    pub fn deficit_table(&self) -> &OffsetTable {
        self.table.get_or_init(|| {
            let corr = autocorrelation(&self.extents, &self.mask);
            let count = self.count() as f64;
            let cell = self.cell_volume();
            let values = corr.iter().map(|c| (count - c) * cell).collect();
            OffsetTable::new(self.spacing.clone(), self.extents.clone(), values, count * cell)
        })
    }
}

/// `C(k) = #{j : m_j ∧ m_{j+k}}` for `k ∈ ∏[-N_i, N_i]`, row-major.
pub(crate) fn autocorrelation(extents: &[usize], mask: &[bool]) -> Vec<f64> {
    let n = extents.len();
    let padded: Vec<usize> = extents.iter().map(|e| 2 * e + 1).collect();
    let total: usize = padded.iter().product();
    let mut data = vec![Complex::new(0.0, 0.0); total];
    let src_strides = strides_of(extents);
    let pad_strides = strides_of(&padded);
    for (flat, &m) in mask.iter().enumerate() {
        if m {
            let mut rem = flat;
            let mut dst = 0;
            for i in 0..n {
                let idx = rem / src_strides[i];
                rem %= src_strides[i];
                dst += idx * pad_strides[i];
            }
            data[dst] = Complex::new(1.0, 0.0);
        }
    }
    let mut planner = FftPlanner::new();
    fft_nd(&mut data, &padded, &mut planner, false);
    for z in data.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    fft_nd(&mut data, &padded, &mut planner, true);
    let scale = 1.0 / total as f64;
    // out[k] for k_i ∈ [-N_i, N_i] lives at (k_i mod P_i)
    let widths: Vec<usize> = extents.iter().map(|e| 2 * e + 1).collect();
    let out_total: usize = widths.iter().product();
    let out_strides = strides_of(&widths);
    let mut out = vec![0.0; out_total];
    for (flat, o) in out.iter_mut().enumerate() {
        let mut rem = flat;
        let mut src = 0;
        for i in 0..n {
            let idx = rem / out_strides[i];
            rem %= out_strides[i];
            let k = idx as i64 - extents[i] as i64;
            let p = padded[i] as i64;
            src += (k.rem_euclid(p)) as usize * pad_strides[i];
        }
        *o = (data[src].re * scale).round();
    }
    out
}

pub(crate) fn strides_of(extents: &[usize]) -> Vec<usize> {
    let n = extents.len();
    let mut s = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * extents[i + 1];
    }
    s
}

fn fft_nd(data: &mut [Complex<f64>], dims: &[usize], planner: &mut FftPlanner<f64>, inverse: bool) {
    let strides = strides_of(dims);
    let total = data.len();
    let mut line = Vec::new();
    for (axis, &len) in dims.iter().enumerate() {
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let stride = strides[axis];
        line.resize(len, Complex::new(0.0, 0.0));
        for start in 0..total {
            // `start` must be the first element of a line along `axis`
            if !(start / stride).is_multiple_of(len) {
                continue;
            }
            for j in 0..len {
                line[j] = data[start + j * stride];
            }
            fft.process(&mut line);
            for j in 0..len {
                data[start + j * stride] = line[j];
            }
        }
    }
}
