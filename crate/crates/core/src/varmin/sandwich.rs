//! Lower bound ≤ numeric estimate ≤ upper bound checks, single and swept.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{minimize_quotient, Grid, Mask, Mode, SolverConfig, Termination};
use crate::bounds::{bounds_for, DomainKind, DomainSpec, MoserConstants};
use crate::constants::{ConstantKind, ConstantValue, Params, Regime};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichConfig {
    pub solver: SolverConfig,
    /// Grid size M.
    pub points: usize,
    /// Box half-width for bounded domains; defaults to 4|Ω| + |centre|.
    pub box_half_width: Option<f64>,
    /// Relative tolerance of the pass test.
    pub tol: f64,
    pub moser: MoserConstants,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        Self { solver: SolverConfig::default(), points: 4096, box_half_width: None, tol: 0.02, moser: MoserConstants::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub params: Params,
    pub domain: DomainSpec,
    pub lower: ConstantValue,
    /// Absent for bound-only points (p = 1 on the whole space, p = 2 with N ≥ 2).
    pub numeric: Option<ConstantValue>,
    pub upper: ConstantValue,
    /// (numeric − lower)/lower
    pub rel_slack_lower: Option<f64>,
    /// (upper − numeric)/upper
    pub rel_slack_upper: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub iterations: Option<usize>,
    pub termination: Option<Termination>,
    pub tail_fraction: Option<f64>,
}

fn numeric_interval(dom: &DomainSpec) -> Option<(f64, f64)> {
    match dom.kind {
        DomainKind::Interval { a, b } => Some((a, b)),
        DomainKind::Ball { radius } if dom.dim == 1 => Some((-radius, radius)),
        _ => None,
    }
}

/// Brackets the constant at `params` on `dom` and, where supported,
/// places a numerical estimate inside the bracket.
pub fn sandwich(params: &Params, dom: &DomainSpec, cfg: &SandwichConfig) -> Result<SandwichReport> {
    if !(cfg.tol >= 0.0) {
        return Err(Error::Config("sandwich tolerance must be nonnegative".into()));
    }
    let bounds = bounds_for(params, dom, cfg.moser)?;
    let mut report = SandwichReport {
        params: *params,
        domain: *dom,
        lower: bounds.lower.clone(),
        numeric: None,
        upper: bounds.upper.clone(),
        rel_slack_lower: None,
        rel_slack_upper: None,
        tol: cfg.tol,
        pass: bounds.lower.value <= bounds.upper.value * (1.0 + crate::bounds::ROUNDING_SLACK),
        iterations: None,
        termination: None,
        tail_fraction: None,
    };
    let numeric = match params.regime() {
        Regime::P1 if dom.is_bounded() => {
            // Every bounded domain here is a ball, where the characteristic
            // function is extremal and the lower formula is exact.
            Some(ConstantValue::new(
                bounds.lower.value,
                ConstantKind::NumericEstimate,
                "char-ball-exact",
                bounds.lower.error_estimate,
            )?)
        }
        Regime::P1 => None,
        Regime::P2 | Regime::Limiting if params.n == 1 => {
            let (grid, mask, mode) = match dom.kind {
                DomainKind::WholeSpace { half_width } => {
                    let grid = Grid::new(half_width, cfg.points)?;
                    (grid, None, Mode::WholeSpace)
                }
                _ => {
                    let (a, b) = numeric_interval(dom).ok_or_else(|| Error::Domain("unsupported domain".into()))?;
                    let l = cfg.box_half_width.unwrap_or(4.0 * (b - a) + 0.5 * (a + b).abs());
                    if !(l > a.abs().max(b.abs())) {
                        return domain(format!("box half-width {l} does not contain [{a}, {b}]"));
                    }
                    let grid = Grid::new(l, cfg.points)?;
                    (grid, Some(Mask::interval(grid, a, b)?), Mode::Domain)
                }
            };
            let run = minimize_quotient(&grid, mask.as_ref(), params.s, params.q, mode, &cfg.solver)?;
            report.iterations = Some(run.iterations());
            report.termination = Some(run.termination);
            report.tail_fraction = run.tail_fraction;
            let last = run.trace.last().map_or(cfg.solver.quotient_tol, |t| t.rel_change);
            Some(ConstantValue::new(
                run.estimate,
                ConstantKind::NumericEstimate,
                "spectral-minimizer",
                run.estimate * last.max(cfg.solver.quotient_tol),
            )?)
        }
        _ => None,
    };
    if let Some(num) = numeric {
        let (lo, hi, x) = (report.lower.value, report.upper.value, num.value);
        report.rel_slack_lower = Some((x - lo) / lo);
        report.rel_slack_upper = Some((hi - x) / hi);
        report.pass = x >= lo * (1.0 - cfg.tol) && x <= hi * (1.0 + cfg.tol);
        report.numeric = Some(num);
    }
    Ok(report)
}

/// Cartesian parameter ranges for [`sweep`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(rename = "N")]
    pub n: Vec<u32>,
    pub s: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<(u32, f64, f64, f64)> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &s in &self.s {
                for &p in &self.p {
                    for &q in &self.q {
                        out.push((n, s, p, q));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub report: Option<SandwichReport>,
    pub error: Option<String>,
}

fn sweep_point(point: (u32, f64, f64, f64), dom: &DomainSpec, cfg: &SandwichConfig) -> SweepRow {
    let (n, s, p, q) = point;
    let result = Params::new(n, s, p, q).and_then(|params| {
        let d = dom.with_dim(n)?;
        sandwich(&params, &d, cfg)
    });
    match result {
        Ok(r) => SweepRow { n, s, p, q, report: Some(r), error: None },
        Err(e) => SweepRow { n, s, p, q, report: None, error: Some(e.to_string()) },
    }
}

/// Parallelism cap from the `FRASOB_THREADS` environment variable.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("FRASOB_THREADS").ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// One sandwich per parameter point, rows in input order. Failed points
/// are recorded and the sweep continues.
pub fn sweep(spec: &SweepSpec, dom: &DomainSpec, cfg: &SandwichConfig, threads: Option<usize>) -> Vec<SweepRow> {
    let points = spec.points();
    if points.is_empty() {
        return Vec::new();
    }
    let run = || points.par_iter().map(|&pt| sweep_point(pt, dom, cfg)).collect::<Vec<_>>();
    match threads.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    }
}
