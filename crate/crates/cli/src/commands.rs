use serde::Serialize;
use thiserror::Error;

use fracap_core::besov::{besov_seminorm, coarea_decompose, LevelRule, SampledFunction};
use fracap_core::capacity::{capacity_bracket, capacity_limit_checks, CapacitySearch};
use fracap_core::constants::{sphere_area, tau, unit_ball_volume};
use fracap_core::inequalities::{
    suite_functions, suite_shapes, verify_chain, verify_function, verify_shape, DeficitReport, InequalityId,
};
use fracap_core::numerics::{LimitEnd, LimitScanResult};
use fracap_core::perimeter::{frac_perimeter, limit_alpha0_check, limit_alpha1_check, sharp_constant};
use fracap_core::{AlphaContext, Estimate, Method, Shape};

use crate::config::{Command, RunConfig};
use crate::dsl::{parse_function, parse_shape, ParseError};
use crate::report::{fmt_float, record, Record};

/// Limit scans pass when the extrapolation is this close to its target.
pub const LIMIT_REL_TOL: f64 = 0.02;

#[derive(Debug, Clone, Error)]
pub enum CliError {
    #[error("{}", .0.annotated())]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Core(#[from] fracap_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use fracap_core::Error as E;
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Core(E::InvalidArgument(_) | E::Unsupported(_)) => 2,
            CliError::Core(E::ConvergenceFailure { .. }) => 3,
            CliError::Core(E::InvariantViolation(_)) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Failed,
    NotConverged,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Failed => 1,
            Verdict::NotConverged => 3,
        }
    }
}

/// Records produced so far, the overall verdict, and the error that stopped
/// the run if any.
#[derive(Debug)]
pub struct Report {
    pub records: Vec<Record>,
    pub verdict: Verdict,
    pub error: Option<CliError>,
}

impl Report {
    fn new() -> Self {
        Report { records: Vec::new(), verdict: Verdict::Pass, error: None }
    }

    fn push<T: Serialize>(&mut self, r: &T) {
        self.records.push(record(r));
    }

    fn mark(&mut self, v: Verdict) {
        self.verdict = self.verdict.max(v);
    }

    pub fn exit_code(&self) -> u8 {
        match &self.error {
            Some(e) => e.exit_code(),
            None => self.verdict.exit_code(),
        }
    }
}

/// An estimate, or the best one reached before the tolerance was missed.
fn settle(r: fracap_core::Result<Estimate>, report: &mut Report) -> Result<(Estimate, bool), CliError> {
    match r {
        Ok(e) => Ok((e, true)),
        Err(fracap_core::Error::ConvergenceFailure { best, .. }) => {
            report.mark(Verdict::NotConverged);
            Ok((best, false))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct ConstantsRecord {
    n: usize,
    alpha: f64,
    omega_n: f64,
    sphere_area: f64,
    tau_n: f64,
    q: f64,
    ball_perimeter: f64,
    kappa: f64,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
    converged: bool,
}

#[derive(Serialize)]
struct PerimeterRecord {
    shape: String,
    n: usize,
    alpha: f64,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
    converged: bool,
}

#[derive(Serialize)]
struct BesovRecord {
    function: String,
    route: &'static str,
    n: usize,
    alpha: f64,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
    converged: bool,
}

#[derive(Serialize)]
struct CapacityRecord {
    shape: String,
    n: usize,
    alpha: f64,
    family: &'static str,
    lower: f64,
    lower_error: f64,
    upper: f64,
    upper_error: f64,
    witness: String,
    gap: f64,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct VerifyRecord {
    id: InequalityId,
    subject: String,
    n: usize,
    alpha: f64,
    lhs: f64,
    lhs_error: f64,
    rhs: f64,
    rhs_error: f64,
    ratio: f64,
    slack: f64,
    tol: f64,
    status: &'static str,
    detail: String,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
}

impl From<&DeficitReport> for VerifyRecord {
    fn from(r: &DeficitReport) -> Self {
        let both = r.lhs.plus(r.rhs);
        VerifyRecord {
            id: r.inequality_id,
            subject: r.subject.clone(),
            n: r.n,
            alpha: r.alpha,
            lhs: r.lhs.value,
            lhs_error: r.lhs.error,
            rhs: r.rhs.value,
            rhs_error: r.rhs.error,
            ratio: r.ratio,
            slack: r.slack,
            tol: r.tol,
            status: if r.passed() { "pass" } else { "fail" },
            detail: r.detail.clone(),
            value: r.ratio,
            error: r.ratio.abs() * (r.lhs.rel_error() + r.rhs.rel_error()),
            method: both.method,
            samples: both.samples,
            seed: both.seed,
        }
    }
}

#[derive(Serialize)]
struct LimitRecord {
    shape: String,
    n: usize,
    quantity: &'static str,
    end: u8,
    alphas: String,
    scaled: String,
    extrapolated: f64,
    target: f64,
    rel_err: f64,
    status: &'static str,
    value: f64,
    error: f64,
    method: Method,
    samples: u64,
    seed: u64,
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(";")
}

fn shape_arg(cfg: &RunConfig) -> Result<Shape, CliError> {
    let text = cfg.shape.as_deref().ok_or_else(|| CliError::Usage(format!("{:?} needs --shape", cfg.subcommand)))?;
    let s = parse_shape(text)?;
    check_n(cfg, s.dim())?;
    Ok(s)
}

fn function_arg(cfg: &RunConfig) -> Result<SampledFunction, CliError> {
    let text = cfg.function.as_deref().ok_or_else(|| CliError::Usage(format!("{:?} needs --function", cfg.subcommand)))?;
    let f = parse_function(text)?;
    check_n(cfg, f.dim())?;
    Ok(f)
}

fn check_n(cfg: &RunConfig, dim: usize) -> Result<(), CliError> {
    match cfg.n {
        Some(n) if n != dim => Err(CliError::Usage(format!("--n {n} does not match the input dimension {dim}"))),
        _ => Ok(()),
    }
}

fn ctx(n: usize, alpha: f64) -> Result<AlphaContext, CliError> {
    Ok(AlphaContext::new(n, alpha)?)
}

fn constants(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let dims = match cfg.n {
        Some(n) => vec![n],
        None => vec![1, 2, 3],
    };
    let default: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let spec = cfg.perimeter();
    for n in dims {
        for a in cfg.alphas(&default) {
            let c = ctx(n, a)?;
            let (p, converged) = settle(frac_perimeter(&Shape::unit_ball(n)?, &c, &spec), report)?;
            let kappa = if converged { sharp_constant(&c, &spec)? } else { Estimate { value: f64::NAN, ..p } };
            report.push(&ConstantsRecord {
                n,
                alpha: a,
                omega_n: unit_ball_volume(n),
                sphere_area: sphere_area(n),
                tau_n: tau(n),
                q: c.q(),
                ball_perimeter: p.value,
                kappa: kappa.value,
                value: kappa.value,
                error: kappa.error,
                method: kappa.method,
                samples: kappa.samples,
                seed: kappa.seed,
                converged,
            });
        }
    }
    Ok(())
}

fn perimeter(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let s = shape_arg(cfg)?;
    let spec = cfg.perimeter();
    for a in cfg.alphas(&[0.5]) {
        let (e, converged) = settle(frac_perimeter(&s, &ctx(s.dim(), a)?, &spec), report)?;
        report.push(&PerimeterRecord {
            shape: s.describe(),
            n: s.dim(),
            alpha: a,
            value: e.value,
            error: e.error,
            method: e.method,
            samples: e.samples,
            seed: e.seed,
            converged,
        });
    }
    Ok(())
}

fn besov(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let f = function_arg(cfg)?;
    let spec = cfg.perimeter();
    for a in cfg.alphas(&[0.5]) {
        let c = ctx(f.dim(), a)?;
        let direct = (besov_seminorm(&f, &c), "direct");
        let layered = (coarea_decompose(&f, &c, LevelRule::for_function(&f), &spec), "coarea");
        for (r, route) in [direct, layered] {
            let (e, converged) = settle(r, report)?;
            report.push(&BesovRecord {
                function: f.label().to_owned(),
                route,
                n: f.dim(),
                alpha: a,
                value: e.value,
                error: e.error,
                method: e.method,
                samples: e.samples,
                seed: e.seed,
                converged,
            });
        }
    }
    Ok(())
}

fn capacity(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let s = shape_arg(cfg)?;
    let search = cfg.search();
    for a in cfg.alphas(&[0.5]) {
        let b = capacity_bracket(&s, &ctx(s.dim(), a)?, &search)?;
        let both = b.lower.plus(b.upper);
        report.push(&CapacityRecord {
            shape: s.describe(),
            n: b.n,
            alpha: b.alpha,
            family: search.family.as_str(),
            lower: b.lower.value,
            lower_error: b.lower.error,
            upper: b.upper.value,
            upper_error: b.upper.error,
            witness: b.witness.clone(),
            gap: b.gap(),
            value: b.upper.value,
            error: b.upper.error,
            method: both.method,
            samples: both.samples,
            seed: both.seed,
        });
    }
    Ok(())
}

fn verify_one_function(
    cfg: &RunConfig,
    f: &SampledFunction,
    ids: &[InequalityId],
    report: &mut Report,
) -> Result<(), CliError> {
    let spec = cfg.verify();
    let chain = [InequalityId::Eq1, InequalityId::Eq3, InequalityId::Sobolev];
    for a in cfg.alphas(&[0.5]) {
        let c = ctx(f.dim(), a)?;
        let reports = if chain.iter().all(|id| ids.contains(id)) {
            verify_chain(f, &c, &sharp_constant(&c, &spec.perimeter)?, &spec)?
        } else {
            ids.iter().map(|&id| verify_function(id, f, &c, &spec)).collect::<fracap_core::Result<Vec<_>>>()?
        };
        for r in reports.iter().filter(|r| ids.contains(&r.inequality_id)) {
            if !r.passed() {
                report.mark(Verdict::Failed);
            }
            report.push(&VerifyRecord::from(r));
        }
    }
    Ok(())
}

fn verify_one_shape(cfg: &RunConfig, s: &Shape, ids: &[InequalityId], report: &mut Report) -> Result<(), CliError> {
    let spec = cfg.verify();
    for a in cfg.alphas(&[0.5]) {
        let c = ctx(s.dim(), a)?;
        for &id in ids {
            let r = verify_shape(id, s, &c, &spec)?;
            if !r.passed() {
                report.mark(Verdict::Failed);
            }
            report.push(&VerifyRecord::from(&r));
        }
    }
    Ok(())
}

fn verify(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let selected = &cfg.ineq.0;
    let (fids, sids): (Vec<InequalityId>, Vec<InequalityId>) = selected.iter().partition(|id| id.takes_function());
    let explicit = selected.len() < InequalityId::ALL.len();
    match (&cfg.function, &cfg.shape) {
        (None, None) => {
            for f in suite_functions()?.iter().filter(|f| cfg.n.is_none_or(|n| n == f.dim())) {
                verify_one_function(cfg, f, &fids, report)?;
            }
            for s in suite_shapes()?.iter().filter(|s| cfg.n.is_none_or(|n| n == s.dim())) {
                verify_one_shape(cfg, s, &sids, report)?;
            }
        }
        (f, s) => {
            if explicit && f.is_none() && !fids.is_empty() {
                return Err(CliError::Usage(format!("{} needs --function", fids[0])));
            }
            if explicit && s.is_none() && !sids.is_empty() {
                return Err(CliError::Usage(format!("{} needs --shape", sids[0])));
            }
            if f.is_some() {
                verify_one_function(cfg, &function_arg(cfg)?, &fids, report)?;
            }
            if s.is_some() {
                verify_one_shape(cfg, &shape_arg(cfg)?, &sids, report)?;
            }
        }
    }
    Ok(())
}

fn limit_record(s: &Shape, quantity: &'static str, r: &LimitScanResult) -> LimitRecord {
    let ok = r.rel_err < LIMIT_REL_TOL;
    LimitRecord {
        shape: s.describe(),
        n: s.dim(),
        quantity,
        end: match r.end() {
            LimitEnd::Zero => 0,
            LimitEnd::One => 1,
        },
        alphas: join_floats(&r.alphas),
        scaled: join_floats(&r.scaled_values),
        extrapolated: r.extrapolated,
        target: r.target,
        rel_err: r.rel_err,
        status: if ok { "pass" } else { "fail" },
        value: r.extrapolated,
        // distance from the last scanned value, a proxy for the extrapolation error
        error: (r.extrapolated - r.scaled_values.last().copied().unwrap_or(r.extrapolated)).abs(),
        method: Method::Quadrature,
        samples: 0,
        seed: 0,
    }
}

fn limits(cfg: &RunConfig, report: &mut Report) -> Result<(), CliError> {
    let s = shape_arg(cfg)?;
    if cfg.alpha.is_some() {
        return Err(CliError::Usage("limits takes --alpha-grid, not --alpha".into()));
    }
    let custom = match &cfg.alpha_grid {
        Some(g) => Some((LimitEnd::detect(&g.0)?, g.0.clone())),
        None => None,
    };
    let requested = match (cfg.end, &custom) {
        (Some(e), Some((found, _))) if (e == 0) != (*found == LimitEnd::Zero) => {
            return Err(CliError::Usage(format!("--alpha-grid approaches the other end than --end {e}")))
        }
        (Some(0), _) => vec![LimitEnd::Zero],
        (Some(_), _) => vec![LimitEnd::One],
        (None, Some((found, _))) => vec![*found],
        (None, None) => vec![LimitEnd::Zero, LimitEnd::One],
    };
    let grid = |end: LimitEnd| match &custom {
        Some((found, g)) if *found == end => g.clone(),
        _ => end.default_grid().to_vec(),
    };
    let (g0, g1) = (grid(LimitEnd::Zero), grid(LimitEnd::One));
    let spec = cfg.perimeter();
    let (c0, c1) = capacity_limit_checks(&s, &g0, &g1, &CapacitySearch::at_zero(spec))?;
    for end in requested {
        let (p, c) = match end {
            LimitEnd::Zero => (limit_alpha0_check(&s, &g0, &spec)?, &c0),
            LimitEnd::One => (limit_alpha1_check(&s, &g1, &spec)?, &c1),
        };
        for (quantity, r) in [("perimeter", &p), ("capacity", c)] {
            if r.rel_err >= LIMIT_REL_TOL {
                report.mark(Verdict::Failed);
            }
            report.push(&limit_record(&s, quantity, r));
        }
    }
    Ok(())
}

/// Runs one subcommand. Records computed before an error are kept.
pub fn run(cfg: &RunConfig) -> Report {
    let mut report = Report::new();
    let outcome = match cfg.subcommand {
        Command::Constants => constants(cfg, &mut report),
        Command::Perimeter => perimeter(cfg, &mut report),
        Command::Besov => besov(cfg, &mut report),
        Command::Capacity => capacity(cfg, &mut report),
        Command::Verify => verify(cfg, &mut report),
        Command::Limits => limits(cfg, &mut report),
    };
    report.error = outcome.err();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut r = Report::new();
        assert_eq!(r.exit_code(), 0);
        r.mark(Verdict::Failed);
        assert_eq!(r.exit_code(), 1);
        r.mark(Verdict::NotConverged);
        r.mark(Verdict::Failed);
        assert_eq!(r.exit_code(), 3);
        r.error = Some(CliError::Core(fracap_core::Error::InvariantViolation("x".into())));
        assert_eq!(r.exit_code(), 1);
        r.error = Some(CliError::Core(fracap_core::Error::Unsupported("x".into())));
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn unconverged_estimates_are_kept() {
        let mut r = Report::new();
        let best = Estimate::quadrature(1.5, 0.1);
        let e = fracap_core::Error::ConvergenceFailure { message: "m".into(), best };
        assert_eq!(settle(Err(e), &mut r).unwrap(), (best, false));
        assert_eq!(r.verdict, Verdict::NotConverged);
        assert!(settle(Err(fracap_core::Error::InvalidArgument("x".into())), &mut r).is_err());
    }
}
