//! Numerical best constants by Rayleigh-quotient minimization on a 1-D
//! periodic spectral grid, and sandwich checks against the bound formulas.

mod descent;
mod grid;
mod sandwich;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use descent::{Termination, TraceEntry};
pub use grid::{Field, FracLaplacian, Grid, Mask};
pub use sandwich::{sandwich, sweep, threads_from_env, SandwichConfig, SandwichReport, SweepRow, SweepSpec};

pub(crate) use descent::Problem;

use crate::error::{domain, Error, Result};

/// Fraction of the box kept as support in whole-space mode.
pub const WHOLE_SPACE_WINDOW: f64 = 0.95;
/// Tail-mass threshold for the truncation diagnostic.
pub const TAIL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Relative quotient change below which an iteration counts as stagnant.
    pub quotient_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub shrink: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub seed: u64,
    /// Relative amplitude of the seeded multiplicative perturbation of the initial field.
    pub perturbation: f64,
    pub positivity: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            quotient_tol: 1e-9,
            initial_step: 1.0,
            max_step: 1e3,
            min_step: 1e-14,
            shrink: 0.5,
            armijo: 1e-4,
            seed: 0,
            perturbation: 0.0,
            positivity: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.quotient_tol, self.initial_step, self.max_step, self.min_step, self.armijo];
        if self.max_iters == 0 || positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config("solver iterations, tolerances and steps must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::Config("shrink factor must lie in (0, 1)".into()));
        }
        if !(self.armijo < 1.0) || !(self.perturbation >= 0.0 && self.perturbation < 1.0) {
            return Err(Error::Config("armijo constant and perturbation must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Quotient ‖(−Δ)^{s/2}u‖² / ‖u‖_q² over fields supported in the mask.
    Domain,
    /// Quotient (‖(−Δ)^{s/2}u‖² + ‖u‖²) / ‖u‖_q².
    WholeSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimization {
    pub estimate: f64,
    pub minimizer: Field,
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
    /// Share of ‖u‖_q^q in the outer 5% of the support window (whole-space mode).
    pub tail_fraction: Option<f64>,
}

impl Minimization {
    pub fn converged(&self) -> bool {
        self.termination != Termination::MaxIters
    }

    pub fn truncation_suspect(&self) -> bool {
        self.tail_fraction.is_some_and(|t| t > TAIL_THRESHOLD)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

fn initial_field(grid: &Grid, mask: &Mask, mode: Mode, s: f64, cfg: &SolverConfig) -> Vec<f64> {
    let (centre, k) = mask.hull();
    let mut u: Vec<f64> = grid
        .coords()
        .iter()
        .map(|&x| match mode {
            Mode::Domain => (k * k - (x - centre) * (x - centre)).max(0.0).powf(s),
            Mode::WholeSpace => (-0.5 * x * x).exp(),
        })
        .collect();
    if cfg.perturbation > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for v in u.iter_mut() {
            *v *= 1.0 + cfg.perturbation * rng.gen_range(-1.0..1.0);
        }
    }
    u
}

pub(crate) fn tail_fraction(values: &[f64], grid: &Grid, mask: &Mask, q: f64) -> f64 {
    let (centre, k) = mask.hull();
    let total: f64 = values.iter().map(|v| v.abs().powf(q)).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let tail: f64 = values
        .iter()
        .enumerate()
        .filter(|(j, _)| (grid.x(*j) - centre).abs() > 0.95 * k)
        .map(|(_, v)| v.abs().powf(q))
        .sum();
    tail / total
}

fn whole_space_mass(grid: &Grid) -> Vec<f64> {
    vec![1.0; grid.points()]
}

/// Minimizes the discrete quotient on `grid`.
///
/// Domain mode requires a mask. Whole-space mode uses the given mask or,
/// when none is given, the window |x| < 0.95·L.
pub fn minimize_quotient(grid: &Grid, mask: Option<&Mask>, s: f64, q: f64, mode: Mode, cfg: &SolverConfig) -> Result<Minimization> {
    cfg.validate()?;
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("s must lie in (0, 1), got {s}"));
    }
    if !(q >= 1.0) || !q.is_finite() {
        return domain(format!("q must be >= 1, got {q}"));
    }
    let window;
    let mask = match (mode, mask) {
        (_, Some(m)) => m,
        (Mode::Domain, None) => return domain("domain mode requires a support mask"),
        (Mode::WholeSpace, None) => {
            window = Mask::window(*grid, WHOLE_SPACE_WINDOW)?;
            &window
        }
    };
    if mask.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let op = FracLaplacian::new(*grid, s)?;
    let ones;
    let mass = match mode {
        Mode::Domain => None,
        Mode::WholeSpace => {
            ones = whole_space_mass(grid);
            Some(ones.as_slice())
        }
    };
    let problem = Problem { op: &op, mass, weight: None, q, mask: Some(mask) };
    let mut u = initial_field(grid, mask, mode, s, cfg);
    problem.project(&mut u, cfg.positivity)?;
    let (u, estimate, trace, termination) = problem.descend(u, cfg, |_, _| false)?;
    let tail = (mode == Mode::WholeSpace).then(|| tail_fraction(&u, grid, mask, q));
    Ok(Minimization { estimate, minimizer: Field::new(*grid, u)?, trace, termination, tail_fraction: tail })
}

/// Discrete quotient and its gradient (grid inner product) at `u`.
pub fn quotient_with_gradient(op: &FracLaplacian, q: f64, mode: Mode, u: &Field) -> Result<(f64, Vec<f64>)> {
    if u.grid() != op.grid() {
        return Err(Error::GridMismatch);
    }
    let ones = whole_space_mass(op.grid());
    let mass = (mode == Mode::WholeSpace).then_some(ones.as_slice());
    let problem = Problem { op, mass, weight: None, q, mask: None };
    let e = problem.evaluate(u.values())?;
    Ok((e.quotient, e.grad))
}
