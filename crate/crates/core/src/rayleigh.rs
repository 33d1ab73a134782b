//! Radial test profiles with closed-form norms, the upper-bound objectives
//! they produce, and quadrature/spectral oracles for fractional seminorms.

use std::cell::Cell;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::constants::{frac_isoperimetric, unit_ball_volume, Params, Regime};
use crate::error::{domain, Error, Result};
use crate::specfun::{beta, bessel_j, gamma, integrate, QuadratureConfig};
use crate::varmin::{Field, FracLaplacian, Grid};

/// Radial profiles used as competitors in the upper-bound arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// Indicator of the ball of radius k.
    CharBall { k: f64 },
    /// (k² − |x|²)^s on the ball of radius k.
    Bump { k: f64, s: f64 },
    /// ln K − ln k on |x| ≤ k, ln K − ln|x| on k ≤ |x| ≤ K, zero beyond.
    Moser { k: f64, big_k: f64 },
}

impl RadialProfile {
    pub fn char_ball(k: f64) -> Result<Self> {
        Self::CharBall { k }.validated()
    }

    pub fn bump(k: f64, s: f64) -> Result<Self> {
        Self::Bump { k, s }.validated()
    }

    pub fn moser(k: f64, big_k: f64) -> Result<Self> {
        Self::Moser { k, big_k }.validated()
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::CharBall { k } => k > 0.0 && k.is_finite(),
            Self::Bump { k, s } => k > 0.0 && k.is_finite() && s > 0.0 && s < 1.0,
            Self::Moser { k, big_k } => k > 0.0 && big_k > k && big_k.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            domain(format!("invalid profile {self:?}"))
        }
    }

    pub fn support_radius(&self) -> f64 {
        match *self {
            Self::CharBall { k } | Self::Bump { k, .. } => k,
            Self::Moser { big_k, .. } => big_k,
        }
    }

    /// True when the profile lives inside the unit ball.
    pub fn fits_unit_ball(&self) -> bool {
        self.support_radius() <= 1.0
    }

    /// Radii where the profile is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            Self::CharBall { k } | Self::Bump { k, .. } => vec![k],
            Self::Moser { k, big_k } => vec![k, big_k],
        }
    }

    /// Value at radius r = |x|.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match *self {
            Self::CharBall { k } => {
                if r < k {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Bump { k, s } => {
                if r < k {
                    ((k - r) * (k + r)).powf(s)
                } else {
                    0.0
                }
            }
            Self::Moser { k, big_k } => {
                if r <= k {
                    big_k.ln() - k.ln()
                } else if r < big_k {
                    big_k.ln() - r.ln()
                } else {
                    0.0
                }
            }
        }
    }

    /// Point samples on a one-dimensional grid.
    pub fn sample(&self, grid: Grid) -> Result<Field> {
        Field::from_fn(grid, |x| self.eval(x))
    }

    /// Point samples, except that cells containing a kink hold the cell average.
    pub fn sample_cell_averaged(&self, grid: Grid) -> Result<Field> {
        let h = grid.spacing();
        let mut cuts: Vec<f64> = self.kinks().iter().flat_map(|&r| [-r, r]).collect();
        cuts.sort_by(f64::total_cmp);
        let cfg = QuadratureConfig::with_tolerances(1e-15, 1e-12);
        let mut values = Vec::with_capacity(grid.points());
        for j in 0..grid.points() {
            let x = grid.x(j);
            let (a, b) = (x - 0.5 * h, x + 0.5 * h);
            if !cuts.iter().any(|&c| c > a && c < b) {
                values.push(self.eval(x));
                continue;
            }
            let mut total = 0.0;
            for (lo, hi) in pieces(a, b, &cuts) {
                total += integrate(|t| self.eval(t), lo, hi, &cfg)?.value;
            }
            values.push(total / h);
        }
        Field::new(grid, values)
    }

    /// ∫_ℝ |u|^p for the one-dimensional profile.
    pub fn lp_norm_pow_1d(&self, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let mut cuts = vec![0.0];
        cuts.extend(self.kinks());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            total += integrate(|r| self.eval(r).powf(p), w[0], w[1], cfg)?.value;
        }
        Ok(2.0 * total)
    }

    /// Exponent γ with ∫|u(x+t) − u(x)|^p dx ~ t^γ as t → 0.
    fn difference_order(&self, p: f64) -> f64 {
        match *self {
            Self::CharBall { .. } => 1.0,
            Self::Bump { s, .. } => p.min(1.0 + s * p),
            Self::Moser { .. } => p,
        }
    }
}

fn pieces(a: f64, b: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn check_ns(n: u32, s: f64) -> Result<()> {
    if n == 0 || !(s > 0.0 && s < 1.0) {
        return domain(format!("need N >= 1 and 0 < s < 1, got N={n}, s={s}"));
    }
    Ok(())
}

/// ‖(−Δ)^{s/2}u‖² for the bump (k² − |x|²)^s in ℝᴺ.
pub fn bump_seminorm_sq(n: u32, s: f64, k: f64) -> Result<f64> {
    check_ns(n, s)?;
    if !(k > 0.0) {
        return domain(format!("k must be positive, got {k}"));
    }
    let nf = n as f64;
    let g = gamma(s + 1.0)?;
    Ok(2f64.powf(2.0 * s) * unit_ball_volume(n) * nf / (nf + 2.0 * s) * g * g * k.powf(nf + 2.0 * s))
}

/// ‖u‖_q for the bump (k² − |x|²)^s in ℝᴺ.
pub fn bump_lq_norm(n: u32, s: f64, q: f64, k: f64) -> Result<f64> {
    check_ns(n, s)?;
    if !(q >= 1.0) || !(k > 0.0) {
        return domain(format!("need q >= 1 and k > 0, got q={q}, k={k}"));
    }
    let nf = n as f64;
    let pow = 0.5 * unit_ball_volume(n) * nf * beta(0.5 * nf, q * s + 1.0)? * k.powf(nf + 2.0 * q * s);
    Ok(pow.powf(1.0 / q))
}

/// Bump quotient ‖(−Δ)^{s/2}u‖²/‖u‖_q².
pub fn bump_quotient(n: u32, s: f64, q: f64, k: f64) -> Result<f64> {
    Ok(bump_seminorm_sq(n, s, k)? / bump_lq_norm(n, s, q, k)?.powi(2))
}

/// Both sides of the Sonine-type reduction used for the bump transform:
/// ∫₀¹(1−r²)^s r^{N/2} J_{N/2−1}(2π|ξ|kr) dr and ½(π|ξ|k)^{−s−1}Γ(s+1)J_{N/2+s}(2π|ξ|k).
pub fn bump_bessel_identity(n: u32, s: f64, k: f64, xi: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    check_ns(n, s)?;
    if !(k > 0.0) || !(xi > 0.0) {
        return domain("k and |ξ| must be positive");
    }
    let h = 0.5 * n as f64;
    let a = 2.0 * PI * xi * k;
    // J is defined for every order ≥ −1/2 used here, so failures cannot occur.
    let lhs = integrate(
        |r| bessel_j(h - 1.0, a * r).map_or(f64::NAN, |j| (1.0 - r * r).powf(s) * r.powf(h) * j),
        0.0,
        1.0,
        cfg,
    )?;
    let rhs = 0.5 * (PI * xi * k).powf(-s - 1.0) * gamma(s + 1.0)? * bessel_j(h + s, a)?;
    Ok((lhs.value, rhs))
}

/// The four upper-bound objectives, named by the bound they produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Ball indicators, p = 1 on ℝᴺ.
    P1WholeSpace,
    /// Bumps, p = 2 on ℝᴺ.
    P2WholeSpace,
    /// Moser-type profiles inside the unit interval, s = 1/2.
    LimitingDomain,
    /// Moser-type profiles on the line, s = 1/2.
    LimitingWholeSpace,
}

/// Minimizer of an objective and the minimum value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmin {
    pub k: f64,
    pub big_k: Option<f64>,
    pub value: f64,
}

/// Coefficients (A, a, B, b) of the two-power objectives A k^a + B k^b.
pub fn objective_terms(which: Objective, params: &Params) -> Result<[(f64, f64); 2]> {
    let (n, s, q) = (params.dim(), params.s, params.q);
    match which {
        Objective::P1WholeSpace => {
            check_regime(params, Regime::P1, 1.0)?;
            let w = unit_ball_volume(params.n);
            let crit = frac_isoperimetric(params.n, s)?.value;
            let e = (n - s) / n - 1.0 / q;
            let y = 1.0 - 1.0 / q;
            Ok([(w.powf(e) * crit, n * e), (w.powf(y), n * y)])
        }
        Objective::P2WholeSpace => {
            check_regime(params, Regime::P2, 2.0)?;
            let w = unit_ball_volume(params.n);
            let g = gamma(s + 1.0)?;
            let bq = beta(0.5 * n, q * s + 1.0)?.powf(-2.0 / q);
            let b2 = beta(0.5 * n, 2.0 * s + 1.0)?;
            let lead = (w * n).powf(1.0 - 2.0 / q);
            let e = (n - 2.0 * s) / (2.0 * n) - 1.0 / q;
            Ok([
                (lead * 2f64.powf(2.0 * s + 2.0 / q) / (n + 2.0 * s) * g * g * bq, 2.0 * n * e),
                (lead * 2f64.powf(2.0 / q - 1.0) * b2 * bq, n * (1.0 - 2.0 / q)),
            ])
        }
        _ => Err(Error::Regime(format!("{which:?} has two radii, not a two-power form"))),
    }
}

fn check_regime(params: &Params, regime: Regime, q_min: f64) -> Result<()> {
    params.require(regime)?;
    if params.q <= q_min {
        return Err(Error::Regime(format!("objective needs q > {q_min}, got {}", params.q)));
    }
    Ok(())
}

/// Upper-bound objective at inner radius `k` (and outer radius `big_k` for the Moser families).
pub fn objective(which: Objective, params: &Params, k: f64, big_k: Option<f64>) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return domain(format!("k must be positive, got {k}"));
    }
    match which {
        Objective::P1WholeSpace | Objective::P2WholeSpace => {
            let [(a, ea), (b, eb)] = objective_terms(which, params)?;
            Ok(a * k.powf(ea) + b * k.powf(eb))
        }
        Objective::LimitingDomain | Objective::LimitingWholeSpace => {
            let min_q = if which == Objective::LimitingDomain { 1.0 } else { 2.0 };
            check_regime(params, Regime::Limiting, min_q - f64::EPSILON)?;
            let big = big_k.ok_or_else(|| Error::Domain("outer radius K is required".into()))?;
            if !(big > k) {
                return domain(format!("need k < K, got k={k}, K={big}"));
            }
            let q = params.q;
            let d = big.ln() - k.ln();
            let scale = 2f64.powf(-2.0 / q) * k.powf(-2.0 / q);
            if which == Objective::LimitingDomain {
                if big > 1.0 {
                    return domain(format!("K must not exceed 1 inside the unit interval, got {big}"));
                }
                Ok(scale * PI / d)
            } else {
                Ok(scale * (PI / d + 2.0 * big))
            }
        }
    }
}

/// Closed-form minimizer of each objective.
pub fn objective_argmin(which: Objective, params: &Params) -> Result<Argmin> {
    let (n, s, q) = (params.dim(), params.s, params.q);
    let (k, big_k) = match which {
        Objective::P1WholeSpace => {
            check_regime(params, Regime::P1, 1.0)?;
            let crit = frac_isoperimetric(params.n, s)?.value;
            let x = 1.0 / q - (n - s) / n;
            let base = crit * x / (unit_ball_volume(params.n).powf(s / n) * (1.0 - 1.0 / q));
            (base.powf(1.0 / s), None)
        }
        Objective::P2WholeSpace => {
            check_regime(params, Regime::P2, 2.0)?;
            let g = gamma(s + 1.0)?;
            let x = 1.0 / q - (n - 2.0 * s) / (2.0 * n);
            let base = 2f64.powf(2.0 * s + 1.0) * g * g * x
                / ((n + 2.0 * s) * beta(0.5 * n, 2.0 * s + 1.0)? * (0.5 - 1.0 / q));
            (base.powf(0.5 / s), None)
        }
        Objective::LimitingDomain => ((-0.5 * q).exp(), Some(1.0)),
        Objective::LimitingWholeSpace => {
            let big = 2.0 * PI / ((q - 2.0) * (q - 2.0));
            (big * (-0.5 * (q - 2.0)).exp(), Some(big))
        }
    };
    let value = objective(which, params, k, big_k)?;
    Ok(Argmin { k, big_k, value })
}

/// Double-integral Gagliardo seminorm ∬|u(x) − u(y)|^p/|x − y|^{1+sp} of a
/// one-dimensional profile.
///
/// With t = y − x the integral is 2∫₀^∞ t^{−1−sp} D(t) dt where
/// D(t) = ∫|u(x+t) − u(x)|^p dx. For t < `DIAGONAL_CUTOFF`, D is replaced
/// by its leading power D(δ)(t/δ)^γ; for t ≥ 2R the supports are disjoint
/// and D = 2‖u‖_p^p.
pub fn gagliardo_seminorm_1d(profile: &RadialProfile, s: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) || !(p == 1.0 || p == 2.0) {
        return domain(format!("need 0 < s < 1 and p in {{1, 2}}, got s={s}, p={p}"));
    }
    cfg.validate()?;
    let sp = s * p;
    let gam = profile.difference_order(p);
    if gam <= sp {
        return Err(Error::Singular(format!("{profile:?} has infinite W^{{{s},{p}}} seminorm")));
    }
    let kinks = profile.kinks();
    let reach = 2.0 * profile.support_radius();
    let delta = DIAGONAL_CUTOFF.min(0.5 * reach);

    let failure = Cell::new(false);
    let diff = |t: f64| -> f64 {
        let mut cuts: Vec<f64> = kinks.iter().flat_map(|&r| [-r, r, -r - t, r - t]).collect();
        cuts.sort_by(f64::total_cmp);
        let lo = -profile.support_radius() - t;
        let hi = profile.support_radius();
        let mut total = 0.0;
        for (a, b) in pieces(lo, hi, &cuts) {
            match integrate(|x| (profile.eval(x + t) - profile.eval(x)).abs().powf(p), a, b, cfg) {
                Ok(r) => total += r.value,
                Err(_) => {
                    failure.set(true);
                    return f64::NAN;
                }
            }
        }
        total
    };

    let mut outer_cuts: Vec<f64> = Vec::new();
    let mut c = delta;
    while c < reach {
        outer_cuts.push(c);
        c *= 4.0;
    }
    for &a in &kinks {
        for &b in &kinks {
            outer_cuts.extend([a + b, (a - b).abs()]);
        }
    }
    outer_cuts.sort_by(f64::total_cmp);
    let mut middle = 0.0;
    for (a, b) in pieces(delta, reach, &outer_cuts) {
        middle += integrate(|t| t.powf(-1.0 - sp) * diff(t), a, b, cfg)?.value;
    }
    if failure.get() {
        return Err(Error::NonConvergence { what: "inner difference integral", error_estimate: f64::INFINITY, tolerance: cfg.rel_tol });
    }
    let near = diff(delta) * delta.powf(-sp) / (gam - sp);
    let norm = profile.lp_norm_pow_1d(p, cfg)?;
    let tail = 2.0 * norm * reach.powf(-sp) / sp;
    Ok(2.0 * (near + middle + tail))
}

/// Width of the diagonal band treated through the leading power of D(t).
pub const DIAGONAL_CUTOFF: f64 = 1e-4;

/// Spectral ‖(−Δ)^{s/2}u‖² of grid samples, including the periodic
/// zero-mode correction.
pub fn halflap_norm_sq(field: &Field, s: f64) -> Result<f64> {
    let op = FracLaplacian::new(*field.grid(), s)?;
    Ok(op.energy(field.values()))
}

/// Result of [`moser_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserCheck {
    pub numeric_seminorm: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Compares (2/π)∬_{[k,K]²}(xy)^{−1} ln|(x+y)/(x−y)| with its bound π(ln K − ln k).
pub fn moser_bound_check(k: f64, big_k: f64, cfg: &QuadratureConfig) -> Result<MoserCheck> {
    if !(k > 0.0 && big_k > k && big_k.is_finite()) {
        return domain(format!("need 0 < k < K, got k={k}, K={big_k}"));
    }
    cfg.validate()?;
    let kernel = |t: f64| ((t + 1.0) / (t - 1.0)).abs().ln() / t;
    let failure = Cell::new(false);
    let inner = |y: f64| -> f64 {
        let (a, b) = (k / y, big_k / y);
        let mut total = 0.0;
        let parts: [(f64, f64, QuadratureConfig); 2] = [
            (a, a.max(1.0).min(b), cfg.right_singular(0.5)),
            (a.max(1.0).min(b), b, cfg.left_singular(0.5)),
        ];
        for (lo, hi, c) in parts {
            if hi > lo {
                match integrate(kernel, lo, hi, &c) {
                    Ok(r) => total += r.value,
                    Err(_) => {
                        failure.set(true);
                        return f64::NAN;
                    }
                }
            }
        }
        total / y
    };
    let outer = integrate(inner, k, big_k, cfg)?;
    if failure.get() {
        return Err(Error::NonConvergence { what: "Moser inner integral", error_estimate: f64::INFINITY, tolerance: cfg.rel_tol });
    }
    let numeric = 2.0 / PI * outer.value;
    let bound = PI * (big_k.ln() - k.ln());
    Ok(MoserCheck { numeric_seminorm: numeric, bound, slack: bound - numeric })
}

/// Large-q reference value 2πe approached by q times the line-case constants.
pub const LIMITING_ASYMPTOTE: f64 = 2.0 * PI * E;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_validation() {
        assert!(RadialProfile::moser(1.0, 0.5).is_err());
        assert!(RadialProfile::bump(1.0, 1.0).is_err());
        assert!(RadialProfile::char_ball(0.5).unwrap().fits_unit_ball());
        assert!(!RadialProfile::moser(0.5, 2.0).unwrap().fits_unit_ball());
    }

    #[test]
    fn moser_profile_is_continuous() {
        let m = RadialProfile::moser(0.2, 0.9).unwrap();
        for r in [0.2, 0.9] {
            assert!((m.eval(r - 1e-12) - m.eval(r + 1e-12)).abs() < 1e-10);
        }
        assert_eq!(m.eval(1.0), 0.0);
    }

    #[test]
    fn bump_homogeneity() {
        let (n, s) = (2, 0.3);
        let r = bump_seminorm_sq(n, s, 2.0).unwrap() / bump_seminorm_sq(n, s, 1.0).unwrap();
        assert!((r / 2f64.powf(2.0 + 2.0 * s) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn limiting_domain_minimum() {
        let p = Params::new(1, 0.5, 2.0, 4.0).unwrap();
        let m = objective_argmin(Objective::LimitingDomain, &p).unwrap();
        let want = 2f64.sqrt() * PI * E / 4.0;
        assert!((m.value / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn moser_objective_rejects_outer_radius_beyond_one() {
        let p = Params::new(1, 0.5, 2.0, 4.0).unwrap();
        assert!(objective(Objective::LimitingDomain, &p, 0.1, Some(1.5)).is_err());
        assert!(objective(Objective::LimitingDomain, &p, 0.1, None).is_err());
    }
}
