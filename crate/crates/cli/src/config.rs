use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use fracap_core::capacity::{CapacitySearch, Family};
use fracap_core::inequalities::{InequalityId, VerifySpec};
use fracap_core::numerics::McSpec;
use fracap_core::perimeter::{PerimeterMethod, PerimeterSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// ω_n, τ_n and κ over an α grid
    Constants,
    /// Fractional perimeter of a shape
    Perimeter,
    /// Besov seminorm of a function, directly and by levels
    Besov,
    /// Capacity bracket of a compact shape
    Capacity,
    /// Check inequalities on a function, a shape or the built-in suite
    Verify,
    /// α → 0 and α → 1 scans of perimeter and capacity
    Limits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Quad,
    Mc,
}

impl From<MethodArg> for PerimeterMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => PerimeterMethod::Auto,
            MethodArg::Quad => PerimeterMethod::Quadrature,
            MethodArg::Mc => PerimeterMethod::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Dilates,
    Neighborhoods,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Dilates => Family::Dilates,
            FamilyArg::Neighborhoods => Family::Neighborhoods,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `a:b:steps`, `steps` equally spaced values from `a` to `b` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid(pub Vec<f64>);

impl FromStr for AlphaGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, steps] = parts.as_slice() else {
            return Err(format!("expected a:b:steps, found '{s}'"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
        let (a, b) = (num(a)?, num(b)?);
        let steps: usize = steps.trim().parse().map_err(|_| format!("'{steps}' is not a step count"))?;
        if steps == 0 {
            return Err("steps must be at least 1".into());
        }
        let grid: Vec<f64> = if steps == 1 {
            vec![a]
        } else {
            (0..steps).map(|k| a + (b - a) * k as f64 / (steps - 1) as f64).collect()
        };
        if let Some(x) = grid.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(format!("α = {x} is outside (0, 1)"));
        }
        Ok(AlphaGrid(grid))
    }
}

/// Which inequalities `verify` runs.
#[derive(Debug, Clone, PartialEq)]
pub struct IneqSelection(pub Vec<InequalityId>);

impl FromStr for IneqSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(IneqSelection(InequalityId::ALL.to_vec()));
        }
        let mut ids = Vec::new();
        for t in s.split(',') {
            let id: InequalityId = t.trim().parse().map_err(|e: fracap_core::Error| e.to_string())?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        Ok(IneqSelection(ids))
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fracap", version, about = "Fractional perimeters, Besov seminorms and fractional capacities")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub subcommand: Command,

    /// Shape, e.g. `ball:n=2,r=1,c=0,0`
    #[arg(long)]
    pub shape: Option<String>,

    /// Function, e.g. `tent:n=1` or `cutoff:shape=<shape>,eps=0.1`
    #[arg(long)]
    pub function: Option<String>,

    /// Dimension; must agree with the shape or function when both are given
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long, conflicts_with = "alpha_grid")]
    pub alpha: Option<f64>,

    /// a:b:steps
    #[arg(long)]
    pub alpha_grid: Option<AlphaGrid>,

    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,

    /// Monte Carlo sample count
    #[arg(long, default_value_t = McSpec::default().samples)]
    pub samples: u64,

    #[arg(long, env = "FRACAP_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Monte Carlo chunks (fixes the stream layout, not the thread count)
    #[arg(long, default_value_t = McSpec::default().chunks)]
    pub chunks: u64,

    /// Relative tolerance of the radial quadrature; replaces the default
    /// absolute floor, so unreachable values end in a convergence failure
    #[arg(long)]
    pub tol: Option<f64>,

    /// `all` or a comma list of eq1, eq2, eq3, eq4, sobolev, isocap, isoper
    #[arg(long, default_value = "all")]
    pub ineq: IneqSelection,

    /// Limit end: 0 for α → 0, 1 for α → 1
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub end: Option<u8>,

    #[arg(long, value_enum, default_value_t = FamilyArg::Dilates)]
    pub family: FamilyArg,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Threads for Monte Carlo; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,

    /// Offset sampling exponent margin
    #[arg(long, default_value_t = PerimeterSpec::default().eps0)]
    pub eps0: f64,
}

impl RunConfig {
    /// `--alpha`, else `--alpha-grid`, else `default`.
    pub fn alphas(&self, default: &[f64]) -> Vec<f64> {
        match (&self.alpha, &self.alpha_grid) {
            (Some(a), _) => vec![*a],
            (None, Some(g)) => g.0.clone(),
            (None, None) => default.to_vec(),
        }
    }

    pub fn mc(&self) -> McSpec {
        McSpec { samples: self.samples, seed: self.seed, chunks: self.chunks, workers: self.workers }
    }

    pub fn perimeter(&self) -> PerimeterSpec {
        let mut spec = PerimeterSpec::default().with_method(self.method.into()).with_mc(self.mc());
        if let Some(t) = self.tol {
            spec = spec.with_rel_tol(t);
            spec.quad.abs_tol = 0.0;
        }
        spec.eps0 = self.eps0;
        spec
    }

    pub fn search(&self) -> CapacitySearch {
        CapacitySearch::default().with_family(self.family.into()).with_perimeter(self.perimeter())
    }

    pub fn verify(&self) -> VerifySpec {
        let spec = VerifySpec::default().with_perimeter(self.perimeter());
        VerifySpec { search: self.search(), ..spec }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_grids() {
        let g: AlphaGrid = "0.1:0.9:5".parse().unwrap();
        assert_eq!(g.0.len(), 5);
        assert!((g.0[2] - 0.5).abs() < 1e-15);
        assert_eq!("0.3:0.9:1".parse::<AlphaGrid>().unwrap().0, vec![0.3]);
        assert!("0:0.5:3".parse::<AlphaGrid>().is_err());
        assert!("0.1:0.5".parse::<AlphaGrid>().is_err());
        assert!("0.1:0.5:0".parse::<AlphaGrid>().is_err());
    }

    #[test]
    fn inequality_selection() {
        assert_eq!("all".parse::<IneqSelection>().unwrap().0.len(), 7);
        let s: IneqSelection = "eq1,isocap,eq1".parse().unwrap();
        assert_eq!(s.0, vec![InequalityId::Eq1, InequalityId::Isocapacitary]);
        assert!("eq5".parse::<IneqSelection>().is_err());
    }

    #[test]
    fn flags_reach_the_specs() {
        let c = RunConfig::try_parse_from([
            "fracap", "perimeter", "--method", "mc", "--samples", "10", "--seed", "3", "--tol", "1e-6", "--workers", "2",
        ])
        .unwrap();
        let p = c.perimeter();
        assert_eq!(p.method, PerimeterMethod::MonteCarlo);
        assert_eq!((p.mc.samples, p.mc.seed, p.mc.workers), (10, 3, 2));
        assert_eq!((p.quad.rel_tol, p.quad.abs_tol), (1e-6, 0.0));
        assert_eq!(c.verify().search.perimeter, p);
        assert!(RunConfig::try_parse_from(["fracap", "limits", "--end", "2"]).is_err());
        assert!(RunConfig::try_parse_from(["fracap", "besov", "--alpha", "0.5", "--alpha-grid", "0.1:0.2:2"]).is_err());
    }
}
