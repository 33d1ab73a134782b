//! Existence thresholds built from the embedding constants, a constrained
//! ground-state solver for (−Δ)ˢu + Vu = Q|u|^{q−2}u on the line, and the
//! defect identity behind nonexistence for the coupled system.

use serde::{Deserialize, Serialize};

use crate::constants::{classical_sobolev, critical_exponent, frac_sobolev_hilbert};
use crate::error::{domain, Error, Result};
use crate::varmin::{Field, FracLaplacian, Grid, Mask, Problem, SolverConfig, Termination, WHOLE_SPACE_WINDOW};

fn check_q(q: f64) -> Result<()> {
    if q > 2.0 && q.is_finite() {
        Ok(())
    } else {
        domain(format!("q must exceed 2, got {q}"))
    }
}

fn check_constant(s_value: f64) -> Result<()> {
    if s_value > 0.0 && s_value.is_finite() {
        Ok(())
    } else {
        domain(format!("embedding constant must be positive, got {s_value}"))
    }
}

/// Palais–Smale level (1/2 − 1/q)·S^{q/(q−2)}.
pub fn ps_level(q: f64, s_value: f64) -> Result<f64> {
    check_q(q)?;
    check_constant(s_value)?;
    Ok((0.5 - 1.0 / q) * s_value.powf(q / (q - 2.0)))
}

/// Norm thresholds (S^{q/(q−2)}, S^{1/(q−2)}) for the H^s norm squared and the L^q norm.
pub fn ground_state_thresholds(q: f64, s_value: f64) -> Result<(f64, f64)> {
    check_q(q)?;
    check_constant(s_value)?;
    Ok((s_value.powf(q / (q - 2.0)), s_value.powf(1.0 / (q - 2.0))))
}

/// Coefficient (q/2)·S^{q/2} of the growth condition f(t) ≥ c|t|^{q−2}t.
pub fn growth_coefficient(q: f64, s_value: f64) -> Result<f64> {
    check_q(q)?;
    check_constant(s_value)?;
    Ok(0.5 * q * s_value.powf(0.5 * q))
}

/// Lower threshold on λ in f(t) ≥ λt^{q−1}: the bracket form for N ≥ 2,
/// 0 < s < 1, and ((q−2)/q)^{(q−2)/2}S^{q/2} on the line at s = 1/2.
pub fn growth_lambda(n: u32, s: f64, q: f64, s_value: f64) -> Result<f64> {
    check_q(q)?;
    check_constant(s_value)?;
    let nf = n as f64;
    if n == 1 && s == 0.5 {
        return Ok(((q - 2.0) / q).powf(0.5 * (q - 2.0)) * s_value.powf(0.5 * q));
    }
    if n < 2 || !(s > 0.0 && s < 1.0) {
        return Err(Error::Regime(format!("growth threshold needs N >= 2 with 0 < s < 1, or N = 1 with s = 1/2; got N={n}, s={s}")));
    }
    let crit = frac_sobolev_hilbert(n, s)?.value;
    let r = nf / (2.0 * s);
    let bracket = nf.powf(r) * (q - 2.0) / (2.0 * s * q * crit.powf(r) * (nf - 2.0 * s).powf((nf - 2.0 * s) / (2.0 * s)));
    Ok(bracket.powf(0.5 * (q - 2.0)) * s_value.powf(0.5 * q))
}

/// α = [𝒮^{N/2s} / ((N/s)(1/2 − 1/q)S^{q/(q−2)})]^{1/(q/(q−2) − N/2s)}
/// where 𝒮 is the sharp critical constant (fractional for s < 1, classical at s = 1).
pub fn alpha_fraction(n: u32, s: f64, q: f64, s_value: f64) -> Result<f64> {
    check_q(q)?;
    check_constant(s_value)?;
    if !(s > 0.0 && s <= 1.0) {
        return domain(format!("s must lie in (0, 1], got {s}"));
    }
    let nf = n as f64;
    let crit_q = critical_exponent(n, s, 2.0).ok_or_else(|| Error::Regime(format!("alpha needs N > 2s, got N={n}, s={s}")))?;
    if q > crit_q {
        return Err(Error::Regime(format!("alpha needs q <= {crit_q}, got {q}")));
    }
    let gap = q / (q - 2.0) - nf / (2.0 * s);
    if q == crit_q || gap.abs() < 1e-12 {
        return Err(Error::Singular(format!("alpha exponent 1/(q/(q-2) - N/2s) is undefined at q = {crit_q}")));
    }
    let crit = if s == 1.0 { classical_sobolev(n, 2.0)? } else { frac_sobolev_hilbert(n, s)? }.value;
    let ratio = crit.powf(nf / (2.0 * s)) / (nf / s * (0.5 - 1.0 / q) * s_value.powf(q / (q - 2.0)));
    Ok(ratio.powf(1.0 / gap))
}

/// The interval [√(1 − α), 1) that contains the coupling threshold.
pub fn lambda_interval(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha must lie in (0, 1), got {alpha}"));
    }
    Ok(((1.0 - alpha).sqrt(), 1.0))
}

/// All thresholds for one (N, s, q) and a value of S_{s,q}(ℝᴺ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub c_star: f64,
    pub h_norm_threshold: f64,
    pub lq_norm_threshold: f64,
    pub growth_coeff: f64,
    /// Present where the growth threshold has a formula.
    pub growth_lambda: Option<f64>,
    /// Present for N > 2s and q below the critical exponent.
    pub alpha: Option<f64>,
    pub lambda_lower: Option<f64>,
}

pub fn threshold_report(n: u32, s: f64, q: f64, s_value: f64) -> Result<ThresholdReport> {
    let c_star = ps_level(q, s_value)?;
    let (h_norm_threshold, lq_norm_threshold) = ground_state_thresholds(q, s_value)?;
    let growth_coeff = growth_coefficient(q, s_value)?;
    let growth_lambda = growth_lambda(n, s, q, s_value).ok();
    let alpha = alpha_fraction(n, s, q, s_value).ok();
    let lambda_lower = alpha.and_then(|a| lambda_interval(a).ok()).map(|(lo, _)| lo);
    Ok(ThresholdReport { c_star, h_norm_threshold, lq_norm_threshold, growth_coeff, growth_lambda, alpha, lambda_lower })
}

/// Outcome of checking a sampled coefficient against its hypothesis class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// The coefficient is not identically 1.
    pub nontrivial: bool,
    /// Q ≥ 1, or 0 < V ≤ 1.
    pub bounded: bool,
    /// Within tolerance of 1 on the outer 5% of the box.
    pub tends_to_one: bool,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.nontrivial && self.bounded && self.tends_to_one
    }
}

fn hypotheses(field: &Field, tol: f64, bounded: impl Fn(f64) -> bool) -> HypothesisReport {
    let g = field.grid();
    let edge = WHOLE_SPACE_WINDOW * g.half_width();
    let v = field.values();
    HypothesisReport {
        nontrivial: v.iter().any(|&x| (x - 1.0).abs() > tol),
        bounded: v.iter().all(|&x| bounded(x)),
        tends_to_one: v.iter().enumerate().filter(|(j, _)| g.x(*j).abs() >= edge).all(|(_, &x)| (x - 1.0).abs() <= tol),
    }
}

/// Checks Q ≢ 1, Q ≥ 1 and Q → 1 at infinity on the samples.
pub fn check_weight(q_field: &Field, tol: f64) -> HypothesisReport {
    hypotheses(q_field, tol, |x| x >= 1.0)
}

/// Checks V ≢ 1, 0 < V ≤ 1 and V → 1 at infinity on the samples.
pub fn check_potential(v_field: &Field, tol: f64) -> HypothesisReport {
    hypotheses(v_field, tol, |x| x > 0.0 && x <= 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateConfig {
    pub solver: SolverConfig,
    /// Stop once the relative residual falls below this value.
    pub residual_target: f64,
    /// Residuals above this value are flagged.
    pub residual_limit: f64,
    /// Starting field; a Gaussian when absent.
    pub initial: Option<Field>,
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig { quotient_tol: 1e-14, ..SolverConfig::default() },
            residual_target: 1e-6,
            residual_limit: 1e-4,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateReport {
    /// ‖mask·((−Δ)ˢu₀ + Vu₀ − Qu₀^{q−1})‖₂ / ‖mask·Qu₀^{q−1}‖₂
    pub residual: f64,
    pub residual_ok: bool,
    /// ‖(−Δ)^{s/2}u₀‖² + ‖u₀‖²
    pub h_norm_sq: f64,
    pub lq_norm: f64,
    pub min_value: f64,
    pub termination: Termination,
    /// I along the accepted iterates.
    pub energy_trace: Vec<f64>,
}

impl GroundStateReport {
    pub fn converged(&self) -> bool {
        matches!(self.termination, Termination::Converged | Termination::Target)
    }

    pub fn energy_monotone(&self) -> bool {
        self.energy_trace.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn compare_thresholds(&self, q: f64, s_value: f64) -> Result<ThresholdComparison> {
        let (h, l) = ground_state_thresholds(q, s_value)?;
        Ok(ThresholdComparison {
            h_norm_sq: self.h_norm_sq,
            h_norm_threshold: h,
            h_norm_below: self.h_norm_sq < h,
            lq_norm: self.lq_norm,
            lq_norm_threshold: l,
            lq_norm_below: self.lq_norm < l,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdComparison {
    pub h_norm_sq: f64,
    pub h_norm_threshold: f64,
    pub h_norm_below: bool,
    pub lq_norm: f64,
    pub lq_norm_threshold: f64,
    pub lq_norm_below: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    /// Solution u₀ = (2I₀)^{1/(q−2)}u of the equation.
    pub u0: Field,
    /// Minimum I₀ of I(u) = ½(‖(−Δ)^{s/2}u‖² + ∫Vu²) on ∫Q|u|^q = 1.
    pub level: f64,
    /// The constrained minimizer u before rescaling.
    pub minimizer: Field,
    pub report: GroundStateReport,
}

struct Residual<'a> {
    op: &'a FracLaplacian,
    v: &'a [f64],
    weight: &'a [f64],
    mask: &'a Mask,
    q: f64,
}

impl Residual<'_> {
    fn eval(&self, u0: &[f64]) -> f64 {
        let au = self.op.apply(u0);
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..u0.len() {
            if !self.mask.contains(j) {
                continue;
            }
            let rhs = self.weight[j] * u0[j].abs().powf(self.q - 2.0) * u0[j];
            let r = au[j] + self.v[j] * u0[j] - rhs;
            num += r * r;
            den += rhs * rhs;
        }
        (num / den).sqrt()
    }
}

fn rescale(u: &[f64], quotient: f64, q: f64) -> Vec<f64> {
    let c = quotient.powf(1.0 / (q - 2.0));
    u.iter().map(|x| c * x).collect()
}

/// Minimizes I on the weighted L^q sphere and rescales the minimizer into
/// a solution of (−Δ)ˢu + Vu = Q|u|^{q−2}u on the support window |x| < 0.95L.
pub fn ground_state_solve(grid: &Grid, s: f64, q: f64, v: &Field, weight: &Field, cfg: &GroundStateConfig) -> Result<GroundState> {
    cfg.solver.validate()?;
    check_q(q)?;
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("s must lie in (0, 1), got {s}"));
    }
    if v.grid() != grid || weight.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if v.values().iter().chain(weight.values()).any(|&x| !(x > 0.0)) {
        return domain("V and Q must be positive");
    }
    let mask = Mask::window(*grid, WHOLE_SPACE_WINDOW)?;
    let op = FracLaplacian::new(*grid, s)?;
    let problem = Problem { op: &op, mass: Some(v.values()), weight: Some(weight.values()), q, mask: Some(&mask) };
    let mut u = match &cfg.initial {
        Some(f) if f.grid() != grid => return Err(Error::GridMismatch),
        Some(f) => f.values().to_vec(),
        None => grid.coords().iter().map(|x| (-0.5 * x * x).exp()).collect(),
    };
    problem.project(&mut u, cfg.solver.positivity)?;
    let residual = Residual { op: &op, v: v.values(), weight: weight.values(), mask: &mask, q };
    let target = cfg.residual_target;
    let (u, quotient, trace, termination) =
        problem.descend(u, &cfg.solver, |u, r| residual.eval(&rescale(u, r, q)) < target)?;
    let u0 = rescale(&u, quotient, q);
    let res = residual.eval(&u0);
    if termination == Termination::MaxIters && res > cfg.residual_limit {
        return Err(Error::NonConvergence { what: "ground state", error_estimate: res, tolerance: cfg.residual_limit });
    }
    let h = grid.spacing();
    let h_norm_sq = op.energy(&u0) + h * u0.iter().map(|x| x * x).sum::<f64>();
    let lq_norm = (h * u0.iter().map(|x| x.abs().powf(q)).sum::<f64>()).powf(1.0 / q);
    let min_value = u0.iter().enumerate().filter(|(j, _)| mask.contains(*j)).map(|(_, &x)| x).fold(f64::INFINITY, f64::min);
    let report = GroundStateReport {
        residual: res,
        residual_ok: res <= cfg.residual_limit,
        h_norm_sq,
        lq_norm,
        min_value,
        termination,
        energy_trace: trace.iter().map(|t| 0.5 * t.quotient).collect(),
    };
    Ok(GroundState { u0: Field::new(*grid, u0)?, level: 0.5 * quotient, minimizer: Field::new(*grid, u)?, report })
}

/// ∫u² + ∫v² − 2λ∫uv, which is at least (1 − λ)(∫u² + ∫v²).
pub fn pohozaev_defect(u: &Field, v: &Field, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return domain(format!("lambda must lie in (0, 1], got {lambda}"));
    }
    let uv = u.dot(v)?;
    Ok(u.l2_norm_sq() + v.l2_norm_sq() - 2.0 * lambda * uv)
}
