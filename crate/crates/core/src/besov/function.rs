use std::fmt;

use crate::constants::MAX_DIM;
use crate::error::{invalid, Result};
use crate::geometry::{AxisBox, Shape};

/// A compactly supported function, constant on the cells of a regular grid.
///
/// Cell `j` covers `origin + [j, j + 1)·spacing` and carries the value sampled
/// at its centre. The outermost layer of cells is zero, which witnesses the
/// compact support.
#[derive(Clone)]
pub struct SampledFunction {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    extents: Vec<usize>,
    values: Vec<f64>,
    label: String,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("label", &self.label)
            .field("origin", &self.origin)
            .field("spacing", &self.spacing)
            .field("extents", &self.extents)
            .finish()
    }
}

impl SampledFunction {
    /// `values` are row-major with the last axis fastest.
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, extents: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let n = extents.len();
        if n == 0 || n > MAX_DIM {
            return invalid(format!("grid dimension {n} unsupported"));
        }
        if origin.len() != n || spacing.len() != n {
            return invalid("origin, spacing and extents must have the same length");
        }
        if origin.iter().any(|x| !x.is_finite()) {
            return invalid("grid origin must be finite");
        }
        if spacing.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return invalid("grid spacing must be positive");
        }
        if extents.iter().any(|&e| e < 3) {
            return invalid("every grid axis needs at least 3 cells");
        }
        let total: usize = extents.iter().product();
        if values.len() != total {
            return invalid(format!("expected {total} values, got {}", values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return invalid(format!("value {i} is not finite"));
        }
        let f = SampledFunction { origin, spacing, extents, values, label: "grid".into() };
        let mut idx = vec![0usize; n];
        for (flat, v) in f.values.iter().enumerate() {
            f.unflatten(flat, &mut idx);
            let boundary = idx.iter().zip(&f.extents).any(|(&i, &e)| i == 0 || i + 1 == e);
            if boundary && *v != 0.0 {
                return invalid(format!("boundary cell {idx:?} is nonzero; the outer cell layer must vanish"));
            }
        }
        Ok(f)
    }

    /// Samples `g` at cell centres of a grid covering `support` with
    /// `cells` cells per unit length, plus one zero layer on each side.
    pub fn from_fn(support: &AxisBox, cells_per_unit: f64, g: impl Fn(&[f64]) -> f64) -> Result<Self> {
        if !(cells_per_unit > 0.0 && cells_per_unit.is_finite()) {
            return invalid("cells per unit must be positive");
        }
        let n = support.dim();
        let mut origin = Vec::with_capacity(n);
        let mut spacing = Vec::with_capacity(n);
        let mut extents = Vec::with_capacity(n);
        for i in 0..n {
            let len = support.hi()[i] - support.lo()[i];
            let cells = (len * cells_per_unit).round().max(1.0) as usize;
            let d = len / cells as f64;
            spacing.push(d);
            origin.push(support.lo()[i] - d);
            extents.push(cells + 2);
        }
        let total: usize = extents.iter().product();
        let mut values = vec![0.0; total];
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let probe = SampledFunction { origin: origin.clone(), spacing: spacing.clone(), extents: extents.clone(), values: Vec::new(), label: String::new() };
        for (flat, v) in values.iter_mut().enumerate() {
            probe.unflatten(flat, &mut idx);
            if idx.iter().zip(&extents).any(|(&i, &e)| i == 0 || i + 1 == e) {
                continue;
            }
            for k in 0..n {
                x[k] = origin[k] + (idx[k] as f64 + 0.5) * spacing[k];
            }
            *v = g(&x);
        }
        SampledFunction::new(origin, spacing, extents, values)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub(crate) fn unflatten(&self, mut flat: usize, idx: &mut [usize]) {
        for k in (0..self.extents.len()).rev() {
            idx[k] = flat % self.extents[k];
            flat /= self.extents[k];
        }
    }

    pub(crate) fn strides(&self) -> Vec<usize> {
        crate::geometry::strides_of(&self.extents)
    }

    /// Box outside which `f` vanishes (the grid without its zero layer).
    pub fn support_box(&self) -> AxisBox {
        let n = self.dim();
        AxisBox::new_unchecked(
            (0..n).map(|k| self.origin[k] + self.spacing[k]).collect(),
            (0..n).map(|k| self.origin[k] + (self.extents[k] - 1) as f64 * self.spacing[k]).collect(),
        )
    }

    /// Value at a point (zero outside the grid).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut flat = 0;
        let strides = self.strides();
        for k in 0..self.dim() {
            let c = ((x[k] - self.origin[k]) / self.spacing[k]).floor();
            if c < 0.0 || c >= self.extents[k] as f64 {
                return 0.0;
            }
            flat += c as usize * strides[k];
        }
        self.values[flat]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn abs(&self) -> SampledFunction {
        SampledFunction { values: self.values.iter().map(|v| v.abs()).collect(), ..self.clone() }
    }

    /// `x ↦ f(r x)`: the same values on a grid scaled by `1/r`.
    pub fn compose_scale(&self, r: f64) -> Result<SampledFunction> {
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("scale factor must be positive, got {r}"));
        }
        Ok(SampledFunction {
            origin: self.origin.iter().map(|x| x / r).collect(),
            spacing: self.spacing.iter().map(|d| d / r).collect(),
            label: format!("{}(r·), r={r}", self.label),
            ..self.clone()
        })
    }

    /// Pointwise sum of two functions on the same grid.
    pub fn add(&self, other: &SampledFunction) -> Result<SampledFunction> {
        if self.origin != other.origin || self.spacing != other.spacing || self.extents != other.extents {
            return invalid("functions live on different grids");
        }
        Ok(SampledFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            label: format!("{}+{}", self.label, other.label),
            ..self.clone()
        })
    }

    /// Exact `‖f‖_p` of the cellwise-constant function, `p ≥ 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return invalid(format!("L^p norm needs finite p >= 1, got {p}"));
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((s * self.cell_volume()).powf(1.0 / p))
    }

    /// Total variation: jump sizes times face areas.
    pub fn total_variation(&self) -> f64 {
        let n = self.dim();
        let strides = self.strides();
        let vol = self.cell_volume();
        let mut idx = vec![0usize; n];
        let mut tv = 0.0;
        for flat in 0..self.values.len() {
            self.unflatten(flat, &mut idx);
            for k in 0..n {
                if idx[k] + 1 < self.extents[k] {
                    tv += (self.values[flat + strides[k]] - self.values[flat]).abs() * vol / self.spacing[k];
                }
            }
        }
        tv
    }

    /// Parses the plain-text grid layout: a dimension line, then origin,
    /// spacing and extents lines, then the values in row-major order.
    pub fn parse_grid(text: &str) -> Result<SampledFunction> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let mut next_line = |what: &str| lines.next().map(str::to_owned).ok_or_else(|| crate::Error::InvalidArgument(format!("grid file: missing {what} line")));
        let n: usize = next_line("dimension")?.parse().map_err(|_| crate::Error::InvalidArgument("grid file: bad dimension".into()))?;
        let floats = |l: String, what: &str| -> Result<Vec<f64>> {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| crate::Error::InvalidArgument(format!("grid file: bad {what} entry '{t}'"))))
                .collect()
        };
        let origin = floats(next_line("origin")?, "origin")?;
        let spacing = floats(next_line("spacing")?, "spacing")?;
        let extents: Vec<usize> = next_line("extents")?
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| crate::Error::InvalidArgument(format!("grid file: bad extent '{t}'"))))
            .collect::<Result<_>>()?;
        if origin.len() != n || spacing.len() != n || extents.len() != n {
            return invalid(format!("grid file: origin, spacing and extents need {n} entries each"));
        }
        let mut values = Vec::new();
        for l in lines {
            values.extend(floats(l.to_owned(), "value")?);
        }
        SampledFunction::new(origin, spacing, extents, values)
    }

    /// Inverse of [`SampledFunction::parse_grid`].
    pub fn to_grid_text(&self) -> String {
        let join = |v: Vec<String>| v.join(" ");
        let mut out = format!(
            "{}\n{}\n{}\n{}\n",
            self.dim(),
            join(self.origin.iter().map(|x| format!("{x:e}")).collect()),
            join(self.spacing.iter().map(|x| format!("{x:e}")).collect()),
            join(self.extents.iter().map(|x| x.to_string()).collect()),
        );
        let row = *self.extents.last().unwrap();
        for chunk in self.values.chunks(row) {
            out.push_str(&join(chunk.iter().map(|x| format!("{x:e}")).collect()));
            out.push('\n');
        }
        out
    }

    /// Cells where `|f| > t`, as an index mask.
    pub(crate) fn mask_above(&self, t: f64) -> Vec<bool> {
        self.values.iter().map(|v| v.abs() > t).collect()
    }

    /// Corner of cell `idx`.
    pub(crate) fn cell_corner(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.origin).zip(&self.spacing).map(|((&i, o), d)| o + i as f64 * d).collect()
    }

    /// Grid geometry as a lattice set with the given mask.
    pub(crate) fn lattice(&self, mask: Vec<bool>) -> crate::geometry::LatticeSet {
        crate::geometry::LatticeSet::new(self.origin.clone(), self.spacing.clone(), self.extents.clone(), mask)
    }

    pub(crate) fn shape_from_mask(&self, mask: Vec<bool>) -> Option<Shape> {
        if !mask.iter().any(|m| *m) {
            return None;
        }
        let boxes = crate::geometry::merge_cells(&self.extents, &mask)
            .into_iter()
            .map(|(lo, hi)| AxisBox::new_unchecked(self.cell_corner(&lo), self.cell_corner(&hi)))
            .collect();
        Some(Shape::lattice_union(boxes, self.lattice(mask)))
    }
}
