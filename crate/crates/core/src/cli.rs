//! Command-line front end. Every command writes one JSON document, or CSV
//! rows with `--format csv`, to standard output or `--out FILE`.

use std::f64::consts::{E, PI};
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, bounds_for, BoundPair, DomainKind, DomainSpec, MoserConstants};
use crate::constants::{self, provenance, ConstantKind, ConstantValue, Params, Regime};
use crate::error::{Error, Result};
use crate::pde::{self, GroundStateConfig, GroundStateReport, ThresholdComparison, ThresholdReport};
use crate::rayleigh::{self, Objective, RadialProfile};
use crate::specfun::{self, QuadratureConfig};
use crate::varmin::{self, Field, Grid, Mode, SandwichConfig, SandwichReport, SolverConfig, SweepRow, SweepSpec};

const CSV_COLUMNS: &str = "\
CSV columns by command:
  constants    which,N,s,p,q,value,kind,provenance,error_estimate
  bounds       N,s,p,q,domain,lower,upper,lower_provenance,upper_provenance
  sandwich     N,s,p,q,domain,lower,numeric,upper,rel_slack_lower,rel_slack_upper,pass,iterations,termination,error
  sweep        same columns as sandwich, one row per parameter point
  thresholds   N,s,q,S,S_source,c_star,h_norm_threshold,lq_norm_threshold,growth_coeff,growth_lambda,alpha,lambda_lower
  groundstate  s,q,level,residual,residual_ok,h_norm_sq,lq_norm,min_value,termination,iterations
  validate     check,pass,detail
Floats are written with 17 significant digits.

Exit codes: 0 success, 1 failed check or solver failure, 2 usage error.
Environment: FRASOB_THREADS caps sweep parallelism.";

#[derive(Debug, Parser)]
#[command(name = "frasob", about = "Fractional Sobolev constants, bounds and numerical checks", after_help = CSV_COLUMNS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<std::path::PathBuf>,
    /// Include wall time in the JSON record (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one named constant.
    Constants(ConstantsArgs),
    /// Lower and upper bound for one parameter point.
    Bounds(PointArgs),
    /// Bounds plus a numerical estimate.
    Sandwich(SandwichArgs),
    /// Sandwich over a Cartesian parameter grid.
    Sweep(SweepArgs),
    /// PDE thresholds built from S_{s,q} on the whole space.
    Thresholds(ThresholdArgs),
    /// Constrained ground state of (−Δ)ˢu + Vu = Q|u|^{q−2}u on the line.
    Groundstate(GroundStateArgs),
    /// Run the built-in oracle cross-checks.
    Validate,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long = "N", default_value_t = 1)]
    n: u32,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    /// Radius for the perimeter kernel.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    UnitBall,
    AubinTalenti,
    Isoperimetric,
    FracIsoKernel,
    HardySobolev,
    FracIsoperimetric,
    Lieb,
    NormBridge,
    FracSobolevHilbert,
    MazyaLower,
    LiebLoss,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    s: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long)]
    q: f64,
    /// ball:R, interval:a,b or rn:L
    #[arg(long, allow_hyphen_values = true)]
    domain: String,
    #[command(flatten)]
    moser: MoserArgs,
}

#[derive(Debug, Args)]
struct MoserArgs {
    /// Trudinger–Moser constant of the bounded-domain lower bound (default 1).
    #[arg(long)]
    c1: Option<f64>,
    /// Trudinger–Moser constant of the whole-space lower bound (default 1).
    #[arg(long)]
    c2: Option<f64>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Grid points (power of two).
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    /// Box half-width for bounded domains.
    #[arg(long = "box")]
    box_half_width: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    quotient_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative amplitude of the seeded perturbation of the initial field.
    #[arg(long, default_value_t = 0.0)]
    perturbation: f64,
}

impl SolverArgs {
    fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            quotient_tol: self.quotient_tol,
            seed: self.seed,
            perturbation: self.perturbation,
            ..SolverConfig::default()
        }
    }

    fn sandwich(&self, moser: MoserConstants) -> SandwichConfig {
        SandwichConfig { solver: self.solver(), points: self.grid, box_half_width: self.box_half_width, tol: self.tol, moser }
    }
}

#[derive(Debug, Args)]
struct SandwichArgs {
    #[command(flatten)]
    point: PointArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated dimensions.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    q: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    domain: String,
    #[command(flatten)]
    moser: MoserArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Worker threads; overrides FRASOB_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Source {
    Lower,
    Upper,
    Numeric,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long)]
    s: f64,
    #[arg(long)]
    q: f64,
    /// Value of S_{s,q}(ℝᴺ); overrides --source.
    #[arg(long = "S")]
    s_value: Option<f64>,
    #[arg(long, value_enum, default_value_t = Source::Lower)]
    source: Source,
    /// Truncation half-width for --source numeric.
    #[arg(long = "box", default_value_t = 200.0)]
    box_half_width: f64,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[command(flatten)]
    moser: MoserArgs,
}

#[derive(Debug, Args)]
struct GroundStateArgs {
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    /// Potential V as const:c or gauss:c,a,b (c + a·exp(−b x²)).
    #[arg(long, default_value = "const:1", allow_hyphen_values = true)]
    potential: String,
    /// Weight Q in the same syntax.
    #[arg(long, default_value = "gauss:1,2,1", allow_hyphen_values = true)]
    weight: String,
    #[arg(long = "box", default_value_t = 40.0)]
    box_half_width: f64,
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Compare the solution norms with the thresholds for this S.
    #[arg(long = "S")]
    s_value: Option<f64>,
}

/// Everything a command prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: Vec<String>,
    pub params: Option<Params>,
    pub domain: Option<DomainSpec>,
    pub result: Payload,
    pub provenance: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum Payload {
    Constant { which: String, value: ConstantValue },
    Bounds(BoundPair),
    Sandwich(SandwichReport),
    Sweep(Vec<SweepRow>),
    Thresholds { s_value: f64, s_source: String, report: ThresholdReport },
    GroundState { level: f64, iterations: usize, report: GroundStateReport, thresholds: Option<ThresholdComparison> },
    Validation { passed: usize, failed: usize, checks: Vec<Check> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Parses `ball:R`, `interval:a,b` or `rn:L` in dimension `n`.
pub fn parse_domain(text: &str, n: u32) -> Result<DomainSpec> {
    let usage = || Error::Config(format!("bad domain '{text}', expected ball:R, interval:a,b or rn:L"));
    let (tag, rest) = text.split_once(':').ok_or_else(usage)?;
    let nums: Vec<f64> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| usage())?;
    match (tag, nums.as_slice()) {
        ("ball", [r]) => DomainSpec::ball(n, *r),
        ("interval", [a, b]) if n == 1 => DomainSpec::interval(*a, *b),
        ("interval", [_, _]) => Err(Error::Config("interval domains need N = 1".into())),
        ("rn", [l]) => DomainSpec::whole_space(n, *l),
        _ => Err(usage()),
    }
}

fn parse_coefficient(text: &str, grid: Grid) -> Result<Field> {
    let usage = || Error::Config(format!("bad coefficient '{text}', expected const:c or gauss:c,a,b"));
    let (tag, rest) = text.split_once(':').ok_or_else(usage)?;
    let nums: Vec<f64> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| usage())?;
    match (tag, nums.as_slice()) {
        ("const", [c]) => Field::from_fn(grid, |_| *c),
        ("gauss", [c, a, b]) => Field::from_fn(grid, |x| c + a * (-b * x * x).exp()),
        _ => Err(usage()),
    }
}

fn moser_constants(args: &MoserArgs, params: &Params, domain: Option<&DomainSpec>, err: &mut dyn Write) -> MoserConstants {
    if params.regime() == Regime::Limiting {
        let bounded = domain.is_some_and(|d| d.is_bounded());
        let (name, given) = if bounded { ("--c1", args.c1) } else { ("--c2", args.c2) };
        if given.is_none() {
            let _ = writeln!(err, "warning: {name} not given, using 1.0 for the Trudinger-Moser constant");
        }
    }
    MoserConstants { c1: args.c1.unwrap_or(1.0), c2: args.c2.unwrap_or(1.0) }
}

fn collect_provenance(values: &[&ConstantValue]) -> Vec<String> {
    let mut keys: Vec<String> = values.iter().map(|c| c.provenance.clone()).collect();
    keys.sort();
    keys.dedup();
    keys
}

fn constant(args: &ConstantsArgs) -> Result<ConstantValue> {
    let (n, s, p, q) = (args.n, args.s, args.p, args.q);
    match args.which {
        Which::UnitBall => {
            if n == 0 {
                return Err(Error::Domain("dimension N must be at least 1".into()));
            }
            ConstantValue::closed(constants::unit_ball_volume(n), "unit-ball")
        }
        Which::AubinTalenti => constants::classical_sobolev(n, p),
        Which::Isoperimetric => constants::isoperimetric(n),
        Which::FracIsoKernel => {
            let v = constants::frac_iso_kernel(n, s, args.r)?;
            ConstantValue::new(v, ConstantKind::Quadrature, "frac-iso-kernel", 0.0)
        }
        Which::HardySobolev => constants::hardy_sobolev_a(n, s),
        Which::FracIsoperimetric => constants::frac_isoperimetric(n, s),
        Which::Lieb => constants::lieb_constant(n, s),
        Which::NormBridge => constants::norm_bridge(n, s),
        Which::FracSobolevHilbert => constants::frac_sobolev_hilbert(n, s),
        Which::MazyaLower => constants::mazya_lower(n, s, p),
        Which::LiebLoss => constants::lieb_loss_lower(q),
    }
}

fn point(args: &PointArgs) -> Result<(Params, DomainSpec)> {
    let params = Params::new(args.n, args.s, args.p, args.q)?;
    let dom = parse_domain(&args.domain, args.n)?;
    Ok((params, dom))
}

fn execute(cli: &Cli, argv: &[String], err: &mut dyn Write) -> Result<(OutputRecord, bool)> {
    let start = Instant::now();
    let mut ok = true;
    let (params, domain, result, prov) = match &cli.command {
        Command::Constants(a) => {
            let c = constant(a)?;
            let which = a.which.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            let prov = collect_provenance(&[&c]);
            (None, None, Payload::Constant { which, value: c }, prov)
        }
        Command::Bounds(a) => {
            let (params, dom) = point(a)?;
            let tm = moser_constants(&a.moser, &params, Some(&dom), err);
            let b = bounds_for(&params, &dom, tm)?;
            let prov = collect_provenance(&[&b.lower, &b.upper]);
            (Some(params), Some(dom), Payload::Bounds(b), prov)
        }
        Command::Sandwich(a) => {
            let (params, dom) = point(&a.point)?;
            let tm = moser_constants(&a.point.moser, &params, Some(&dom), err);
            let r = varmin::sandwich(&params, &dom, &a.solver.sandwich(tm))?;
            ok = r.pass;
            let mut cs = vec![&r.lower, &r.upper];
            cs.extend(r.numeric.as_ref());
            let prov = collect_provenance(&cs);
            (Some(params), Some(dom), Payload::Sandwich(r), prov)
        }
        Command::Sweep(a) => {
            let dom = parse_domain(&a.domain, a.n.first().copied().unwrap_or(1))?;
            let spec = SweepSpec { n: a.n.clone(), s: a.s.clone(), p: a.p.clone(), q: a.q.clone() };
            let any_limiting = spec.points().iter().any(|&(n, s, p, q)| Params::new(n, s, p, q).is_ok_and(|x| x.regime() == Regime::Limiting));
            let tm = match any_limiting {
                true => moser_constants(&a.moser, &Params::new(1, 0.5, 2.0, 4.0)?, Some(&dom), err),
                false => MoserConstants { c1: a.moser.c1.unwrap_or(1.0), c2: a.moser.c2.unwrap_or(1.0) },
            };
            let threads = a.threads.or_else(varmin::threads_from_env);
            let rows = varmin::sweep(&spec, &dom, &a.solver.sandwich(tm), threads);
            ok = rows.iter().all(|r| r.report.as_ref().is_some_and(|x| x.pass));
            let mut cs = Vec::new();
            for r in rows.iter().filter_map(|r| r.report.as_ref()) {
                cs.extend([&r.lower, &r.upper]);
                cs.extend(r.numeric.as_ref());
            }
            let prov = collect_provenance(&cs);
            (None, Some(dom), Payload::Sweep(rows), prov)
        }
        Command::Thresholds(a) => {
            let params = Params::new(a.n, a.s, 2.0, a.q)?;
            let dom = DomainSpec::whole_space(a.n, a.box_half_width)?;
            let (s_value, source, prov) = match (a.s_value, a.source) {
                (Some(v), _) => (v, "given".to_string(), Vec::new()),
                (None, Source::Numeric) => {
                    if a.n != 1 {
                        return Err(Error::Regime("numeric S needs N = 1".into()));
                    }
                    let grid = Grid::new(a.box_half_width, a.grid)?;
                    let m = varmin::minimize_quotient(&grid, None, a.s, a.q, Mode::WholeSpace, &SolverConfig::default())?;
                    (m.estimate, "numeric".to_string(), vec!["spectral-minimizer".to_string()])
                }
                (None, src) => {
                    let tm = moser_constants(&a.moser, &params, Some(&dom), err);
                    let b = bounds_for(&params, &dom, tm)?;
                    let c = if src == Source::Lower { b.lower } else { b.upper };
                    let name = if src == Source::Lower { "lower" } else { "upper" };
                    (c.value, name.to_string(), vec![c.provenance])
                }
            };
            let report = pde::threshold_report(a.n, a.s, a.q, s_value)?;
            (Some(params), Some(dom), Payload::Thresholds { s_value, s_source: source, report }, prov)
        }
        Command::Groundstate(a) => {
            let grid = Grid::new(a.box_half_width, a.grid)?;
            let v = parse_coefficient(&a.potential, grid)?;
            let w = parse_coefficient(&a.weight, grid)?;
            let mut cfg = GroundStateConfig::default();
            cfg.solver.max_iters = a.max_iters;
            let gs = pde::ground_state_solve(&grid, a.s, a.q, &v, &w, &cfg)?;
            ok = gs.report.residual_ok;
            let thresholds = a.s_value.map(|sv| gs.report.compare_thresholds(a.q, sv)).transpose()?;
            let iterations = gs.report.energy_trace.len();
            let dom = DomainSpec::whole_space(1, a.box_half_width)?;
            (None, Some(dom), Payload::GroundState { level: gs.level, iterations, report: gs.report, thresholds }, Vec::new())
        }
        Command::Validate => {
            let checks = validation_suite();
            let failed = checks.iter().filter(|c| !c.pass).count();
            ok = failed == 0;
            (None, None, Payload::Validation { passed: checks.len() - failed, failed, checks }, Vec::new())
        }
    };
    debug_assert!(prov.iter().all(|k| provenance::is_registered(k)));
    let record = OutputRecord {
        command: argv.to_vec(),
        params,
        domain,
        result,
        provenance: prov,
        wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok((record, ok))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn domain_label(d: &DomainSpec) -> String {
    match d.kind {
        DomainKind::Ball { radius } => format!("ball:{radius}"),
        DomainKind::Interval { a, b } => format!("interval:{a},{b}"),
        DomainKind::WholeSpace { half_width } => format!("rn:{half_width}"),
    }
}

fn sandwich_row(n: u32, s: f64, p: f64, q: f64, dom: &str, r: Option<&SandwichReport>, error: &str) -> Vec<String> {
    let mut row = vec![n.to_string(), num(s), num(p), num(q), dom.to_string()];
    match r {
        Some(r) => row.extend([
            num(r.lower.value),
            opt(r.numeric.as_ref().map(|c| c.value)),
            num(r.upper.value),
            opt(r.rel_slack_lower),
            opt(r.rel_slack_upper),
            r.pass.to_string(),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            r.termination.map(|t| format!("{t:?}").to_lowercase()).unwrap_or_default(),
            String::new(),
        ]),
        None => {
            row.extend(std::iter::repeat(String::new()).take(8));
            row.push(error.to_string());
        }
    }
    row
}

fn csv_rows(record: &OutputRecord) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let dom = record.domain.as_ref().map(domain_label).unwrap_or_default();
    const SANDWICH: [&str; 14] = [
        "N", "s", "p", "q", "domain", "lower", "numeric", "upper", "rel_slack_lower", "rel_slack_upper", "pass", "iterations",
        "termination", "error",
    ];
    match &record.result {
        Payload::Constant { which, value } => {
            let a = &record.command;
            let get = |flag: &str| a.iter().position(|x| x == flag).and_then(|i| a.get(i + 1)).cloned().unwrap_or_default();
            (
                vec!["which", "N", "s", "p", "q", "value", "kind", "provenance", "error_estimate"],
                vec![vec![
                    which.clone(),
                    get("--N"),
                    get("--s"),
                    get("--p"),
                    get("--q"),
                    num(value.value),
                    format!("{:?}", value.kind).to_lowercase(),
                    value.provenance.clone(),
                    num(value.error_estimate),
                ]],
            )
        }
        Payload::Bounds(b) => (
            vec!["N", "s", "p", "q", "domain", "lower", "upper", "lower_provenance", "upper_provenance"],
            vec![vec![
                b.params.n.to_string(),
                num(b.params.s),
                num(b.params.p),
                num(b.params.q),
                dom,
                num(b.lower.value),
                num(b.upper.value),
                b.lower.provenance.clone(),
                b.upper.provenance.clone(),
            ]],
        ),
        Payload::Sandwich(r) => {
            let p = r.params;
            (SANDWICH.to_vec(), vec![sandwich_row(p.n, p.s, p.p, p.q, &dom, Some(r), "")])
        }
        Payload::Sweep(rows) => (
            SANDWICH.to_vec(),
            rows.iter()
                .map(|r| {
                    let d = r.report.as_ref().map(|x| domain_label(&x.domain)).unwrap_or_else(|| dom.clone());
                    sandwich_row(r.n, r.s, r.p, r.q, &d, r.report.as_ref(), r.error.as_deref().unwrap_or(""))
                })
                .collect(),
        ),
        Payload::Thresholds { s_value, s_source, report } => {
            let p = record.params.expect("thresholds carry params");
            (
                vec![
                    "N", "s", "q", "S", "S_source", "c_star", "h_norm_threshold", "lq_norm_threshold", "growth_coeff", "growth_lambda", "alpha",
                    "lambda_lower",
                ],
                vec![vec![
                    p.n.to_string(),
                    num(p.s),
                    num(p.q),
                    num(*s_value),
                    s_source.clone(),
                    num(report.c_star),
                    num(report.h_norm_threshold),
                    num(report.lq_norm_threshold),
                    num(report.growth_coeff),
                    opt(report.growth_lambda),
                    opt(report.alpha),
                    opt(report.lambda_lower),
                ]],
            )
        }
        Payload::GroundState { level, iterations, report, .. } => {
            let a = &record.command;
            let get = |flag: &str, dflt: &str| a.iter().position(|x| x == flag).and_then(|i| a.get(i + 1)).cloned().unwrap_or(dflt.into());
            (
                vec!["s", "q", "level", "residual", "residual_ok", "h_norm_sq", "lq_norm", "min_value", "termination", "iterations"],
                vec![vec![
                    get("--s", "0.5"),
                    get("--q", "4"),
                    num(*level),
                    num(report.residual),
                    report.residual_ok.to_string(),
                    num(report.h_norm_sq),
                    num(report.lq_norm),
                    num(report.min_value),
                    format!("{:?}", report.termination).to_lowercase(),
                    iterations.to_string(),
                ]],
            )
        }
        Payload::Validation { checks, .. } => (
            vec!["check", "pass", "detail"],
            checks.iter().map(|c| vec![c.name.clone(), c.pass.to_string(), c.detail.clone()]).collect(),
        ),
    }
}

fn render(record: &OutputRecord, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(record).map_err(|e| Error::Config(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let (header, rows) = csv_rows(record);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).map_err(|e| Error::Config(e.to_string()))?;
            for r in rows {
                w.write_record(&r).map_err(|e| Error::Config(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Error::Config(e.to_string()))
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Regime(_) | Error::Config(_) | Error::Singular(_) => 2,
        _ => 1,
    }
}

/// Runs the command line `argv` (program name first) with explicit streams.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (record, ok) = match execute(&cli, argv, err) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let bytes = match render(&record, cli.format) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| e.to_string()),
        None => out.write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return 1;
    }
    if ok {
        0
    } else {
        1
    }
}

/// Runs with the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    run_with(&argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn check(name: &str, got: Result<f64>, want: f64, tol: f64) -> Check {
    match got {
        Ok(v) => {
            let rel = ((v - want) / want).abs();
            Check { name: name.into(), pass: rel <= tol, detail: format!("got {v:.12e}, want {want:.12e}, rel {rel:.1e}") }
        }
        Err(e) => Check { name: name.into(), pass: false, detail: e.to_string() },
    }
}

fn check_flag(name: &str, got: Result<bool>, detail: &str) -> Check {
    match got {
        Ok(pass) => Check { name: name.into(), pass, detail: detail.into() },
        Err(e) => Check { name: name.into(), pass: false, detail: e.to_string() },
    }
}

/// Oracle cross-checks run by `validate`.
pub fn validation_suite() -> Vec<Check> {
    let mut out = vec![
        check("gamma(1/2) = sqrt(pi)", specfun::gamma(0.5), PI.sqrt(), 1e-14),
        check("beta(3/2, 2) = 4/15", specfun::beta(1.5, 2.0), 4.0 / 15.0, 1e-14),
        check("J_{-1/2}(pi) = -sqrt(2)/pi", specfun::bessel_j(-0.5, PI), -(2f64.sqrt()) / PI, 1e-13),
    ];
    for s in [0.25, 0.5, 0.75] {
        out.push(check(
            &format!("1-D fractional isoperimetric at s={s}"),
            constants::frac_isoperimetric(1, s).map(|c| c.value),
            4.0 / (s * (1.0 - s)),
            1e-6,
        ));
    }
    for (n, s) in [(1, 0.25), (2, 0.45), (3, 0.3), (4, 0.1)] {
        let bridged = constants::norm_bridge(n, s).and_then(|b| Ok(2.0 / b.value * constants::frac_sobolev_hilbert(n, s)?.value));
        let lieb = constants::lieb_constant(n, s).map(|c| c.value);
        out.push(match bridged {
            Ok(want) => check(&format!("Lieb constant = (2/B) x Hilbert constant at N={n}, s={s}"), lieb, want, 1e-10),
            Err(e) => Check { name: format!("Lieb bridge N={n}, s={s}"), pass: false, detail: e.to_string() },
        });
    }
    out.push(check(
        "Hilbert constant near s = 1 approaches Aubin-Talenti (N=3)",
        constants::frac_sobolev_hilbert(3, 1.0 - 1e-4).map(|c| c.value),
        constants::classical_sobolev(3, 2.0).map(|c| c.value).unwrap_or(f64::NAN),
        0.01,
    ));
    let endpoints = (|| -> Result<bool> {
        let a = bounds::p1_wholespace_bounds(&Params::new(2, 0.5, 1.0, 1.0)?)?;
        let b = bounds::p2_wholespace_bounds(&Params::new(3, 0.5, 2.0, 2.0)?)?;
        let c = bounds::limiting_wholespace_bounds(&Params::new(1, 0.5, 2.0, 2.0)?, 1.0)?;
        Ok([a, b, c].iter().all(|x| x.lower.value == 1.0 && x.upper.value == 1.0))
    })();
    out.push(check_flag("exact endpoints equal 1", endpoints, "p = 1 at q = 1, p = 2 at q = 2, line case at q = 2"));
    out.push(check(
        "q x line-case domain upper bound at q = 1000 near 2 pi e",
        bounds::limiting_domain_upper(1000.0, 1.0).map(|c| 1000.0 * c.value),
        2.0 * PI * E,
        0.005,
    ));
    let argmins = (|| -> Result<bool> {
        let cases = [
            (Objective::P1WholeSpace, Params::new(1, 0.5, 1.0, 1.5)?),
            (Objective::P2WholeSpace, Params::new(1, 0.25, 2.0, 3.0)?),
            (Objective::LimitingDomain, Params::new(1, 0.5, 2.0, 4.0)?),
            (Objective::LimitingWholeSpace, Params::new(1, 0.5, 2.0, 4.0)?),
        ];
        let mut ok = true;
        for (which, p) in cases {
            let m = rayleigh::objective_argmin(which, &p)?;
            let ub = match which {
                Objective::P1WholeSpace => bounds::p1_wholespace_bounds(&p)?.upper.value,
                Objective::P2WholeSpace => bounds::p2_wholespace_bounds(&p)?.upper.value,
                Objective::LimitingDomain => bounds::limiting_domain_upper(p.q, 1.0)?.value,
                Objective::LimitingWholeSpace => bounds::limiting_wholespace_upper(p.q)?.value,
            };
            ok &= ((m.value - ub) / ub).abs() < 1e-12;
        }
        Ok(ok)
    })();
    out.push(check_flag("objective minima equal the upper bounds", argmins, "all four families, relative 1e-12"));
    let spectral = (|| -> Result<f64> {
        let grid = Grid::new(8.0, 1 << 14)?;
        let f = RadialProfile::bump(1.0, 0.25)?.sample(grid)?;
        rayleigh::halflap_norm_sq(&f, 0.25)
    })();
    out.push(check(
        "bump seminorm closed form vs spectral sum",
        spectral,
        rayleigh::bump_seminorm_sq(1, 0.25, 1.0).unwrap_or(f64::NAN),
        1e-3,
    ));
    let moser = rayleigh::moser_bound_check((-2f64).exp(), 1.0, &QuadratureConfig::with_tolerances(1e-12, 1e-9));
    out.push(check_flag("Moser bound slack is nonnegative", moser.map(|m| m.slack >= 0.0), "(k, K) = (e^-2, 1)"));
    let sandwich = (|| -> Result<bool> {
        let p = Params::new(1, 0.25, 2.0, 3.0)?;
        Ok(varmin::sandwich(&p, &DomainSpec::interval(-1.0, 1.0)?, &SandwichConfig::default())?.pass)
    })();
    out.push(check_flag("interval sandwich at s = 1/4, q = 3", sandwich, "numeric estimate inside the 2% widened bracket"));
    let alpha = (|| -> Result<bool> {
        let mut ok = true;
        for (n, s, q) in [(2, 0.5, 3.0), (3, 0.5, 2.5), (3, 0.75, 3.5)] {
            let lo = bounds::p2_wholespace_bounds(&Params::new(n, s, 2.0, q)?)?.lower.value;
            let a = pde::alpha_fraction(n, s, q, lo)?;
            ok &= a > 0.0 && a < 1.0;
        }
        Ok(ok)
    })();
    out.push(check_flag("alpha from the whole-space lower bound lies in (0, 1)", alpha, "three sample points"));
    out
}
