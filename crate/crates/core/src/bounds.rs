//! Lower and upper bounds for the subcritical best constants.
//!
//! Three families: p = 1 (fractional isoperimetric anchor), p = 2 with
//! N > 2s (Hilbert anchor), and the limiting line case N = 2s = 1. Whole-space
//! lower bounds go through [`young_lower`].

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::constants::{
    frac_isoperimetric, frac_sobolev_hilbert, unit_ball_volume, ConstantKind, ConstantValue, Params, Regime,
};
use crate::error::{domain, Error, Result};
use crate::specfun::{beta, gamma, ln_gamma};

/// Reference limit of q·S_{1,q} in two dimensions (8πe). Exposed as a value only.
pub const LIMITING_2D_REFERENCE: f64 = 8.0 * PI * E;

/// Relative slack allowed when a lower and an upper bound agree algebraically.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Ball { radius: f64 },
    Interval { a: f64, b: f64 },
    WholeSpace { half_width: f64 },
}

/// Integration domain with its measure and inradius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dim: u32,
    #[serde(flatten)]
    pub kind: DomainKind,
    pub measure: Option<f64>,
    pub inradius: Option<f64>,
}

impl DomainSpec {
    pub fn ball(dim: u32, radius: f64) -> Result<Self> {
        if dim == 0 {
            return domain("ball dimension must be at least 1");
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("ball radius must be positive, got {radius}"));
        }
        let measure = unit_ball_volume(dim) * radius.powi(dim as i32);
        Ok(Self { dim, kind: DomainKind::Ball { radius }, measure: Some(measure), inradius: Some(radius) })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return domain(format!("interval requires finite a < b, got [{a}, {b}]"));
        }
        let len = b - a;
        Ok(Self { dim: 1, kind: DomainKind::Interval { a, b }, measure: Some(len), inradius: Some(0.5 * len) })
    }

    pub fn whole_space(dim: u32, half_width: f64) -> Result<Self> {
        if dim == 0 {
            return domain("dimension must be at least 1");
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return domain(format!("truncation half-width must be positive, got {half_width}"));
        }
        Ok(Self { dim, kind: DomainKind::WholeSpace { half_width }, measure: None, inradius: None })
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.kind, DomainKind::WholeSpace { .. })
    }

    /// A copy of this domain living in dimension `dim` (intervals are 1-D only).
    pub fn with_dim(&self, dim: u32) -> Result<Self> {
        match self.kind {
            DomainKind::Ball { radius } => Self::ball(dim, radius),
            DomainKind::Interval { .. } if dim == 1 => Ok(*self),
            DomainKind::Interval { .. } => domain("an interval domain requires N = 1"),
            DomainKind::WholeSpace { half_width } => Self::whole_space(dim, half_width),
        }
    }

    fn bounded_parts(&self, params: &Params) -> Result<(f64, f64)> {
        if self.dim != params.n {
            return domain(format!("domain dimension {} does not match N = {}", self.dim, params.n));
        }
        match (self.measure, self.inradius) {
            (Some(m), Some(r)) => Ok((m, r)),
            _ => domain("a bounded domain is required"),
        }
    }
}

/// Bracket [lower, upper] around an unknown best constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub lower: ConstantValue,
    pub upper: ConstantValue,
    pub params: Params,
    pub domain: DomainSpec,
}

impl BoundPair {
    /// Rejects brackets with lower > upper beyond [`ROUNDING_SLACK`].
    pub fn new(lower: ConstantValue, upper: ConstantValue, params: Params, domain: DomainSpec) -> Result<Self> {
        if lower.kind != ConstantKind::BoundLower || upper.kind != ConstantKind::BoundUpper {
            return Err(Error::Config("bound pair needs a bound_lower and a bound_upper constant".into()));
        }
        if lower.value > upper.value * (1.0 + ROUNDING_SLACK) {
            return Err(Error::BoundOrder { lower: lower.value, upper: upper.value });
        }
        Ok(Self { lower, upper, params, domain })
    }
}

fn lower(value: f64, key: &str, err: f64) -> Result<ConstantValue> {
    ConstantValue::new(value, ConstantKind::BoundLower, key, err)
}

fn upper(value: f64, key: &str, err: f64) -> Result<ConstantValue> {
    ConstantValue::new(value, ConstantKind::BoundUpper, key, err)
}

fn exact_one(params: Params, dom: DomainSpec) -> Result<BoundPair> {
    BoundPair::new(lower(1.0, "exact-endpoint", 0.0)?, upper(1.0, "exact-endpoint", 0.0)?, params, dom)
}

/// Exponent N − sp − Np/q of the dilation rule; equals Np(1/p* − 1/q).
fn dilation_exponent(params: &Params) -> f64 {
    let n = params.dim();
    n - params.s * params.p - n * params.p / params.q
}

/// Value of the constant on the domain dilated by `lambda`.
///
/// Covers both branches: for N > ps the exponent is Np(1/p* − 1/q), and
/// for N = ps it reduces to −Np/q.
pub fn dilation_transfer(value: f64, lambda: f64, params: &Params) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("dilation factor must be positive, got {lambda}"));
    }
    let critical = params.critical_exponent() == Some(params.q);
    if params.regime() == Regime::OutOfScope && !critical {
        return Err(Error::Regime(format!("{params:?} has no bound family")));
    }
    Ok(lambda.powf(dilation_exponent(params)) * value)
}

/// Critical constant reached as q → p*: the fractional isoperimetric
/// constant for p = 1 and the Hilbert constant for p = 2.
pub fn critical_limit(n: u32, s: f64, p: f64) -> Result<ConstantValue> {
    if p == 1.0 {
        frac_isoperimetric(n, s)
    } else if p == 2.0 {
        frac_sobolev_hilbert(n, s)
    } else {
        domain(format!("p must be 1 or 2, got {p}"))
    }
}

/// Young interpolation split (ε, ρ); 1/ρ is the resulting lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YoungSplit {
    pub epsilon: f64,
    pub rho: f64,
}

pub fn young_lower(lambda_exp: f64, s_crit: f64) -> Result<YoungSplit> {
    if !(lambda_exp > 0.0 && lambda_exp < 1.0) {
        return domain(format!("interpolation exponent must lie in (0, 1), got {lambda_exp}"));
    }
    if !(s_crit > 0.0) || !s_crit.is_finite() {
        return domain(format!("critical constant must be positive, got {s_crit}"));
    }
    let l = lambda_exp;
    let epsilon = (l * s_crit / (1.0 - l)).powf(l * (l - 1.0));
    let rho = l.powf(l) * (s_crit / (1.0 - l)).powf(l - 1.0);
    Ok(YoungSplit { epsilon, rho })
}

/// p = 1 on a bounded domain.
pub fn p1_domain_bounds(params: &Params, dom: &DomainSpec) -> Result<BoundPair> {
    params.require(Regime::P1)?;
    let (measure, inradius) = dom.bounded_parts(params)?;
    let crit = frac_isoperimetric(params.n, params.s)?;
    let n = params.dim();
    // 1/1_s* − 1/q as one expression
    let e = (n - params.s) / n - 1.0 / params.q;
    let rel_err = crit.error_estimate / crit.value;
    let lo = crit.value * measure.powf(e);
    let ball = match dom.kind {
        DomainKind::Ball { .. } => measure,
        _ => unit_ball_volume(params.n) * inradius.powi(params.n as i32),
    };
    let hi = crit.value * ball.powf(e);
    BoundPair::new(
        lower(lo, "p1-domain-lower", lo * rel_err)?,
        upper(hi, "p1-domain-upper", hi * rel_err)?,
        *params,
        *dom,
    )
}

/// p = 1 on the whole space.
pub fn p1_wholespace_bounds(params: &Params) -> Result<BoundPair> {
    params.require(Regime::P1)?;
    let dom = DomainSpec::whole_space(params.n, 1.0)?;
    if params.q == 1.0 {
        return exact_one(*params, dom);
    }
    let crit = frac_isoperimetric(params.n, params.s)?;
    let (n, s, q) = (params.dim(), params.s, params.q);
    let kappa = n / s;
    // x = 1/q − 1/1_s*, y = 1 − 1/q, with κ(x + y) = 1.
    let x = (n - q * (n - s)) / (n * q);
    let y = (q - 1.0) / q;
    let split = young_lower(kappa * x, crit.value)?;
    let lo = 1.0 / split.rho;
    let hi = x.powf(-kappa * x) * y.powf(-kappa * y) * crit.value.powf(kappa * y) / kappa;
    let rel_err = kappa * y * crit.error_estimate / crit.value;
    BoundPair::new(
        lower(lo, "p1-whole-space-lower", lo * rel_err)?,
        upper(hi, "p1-whole-space-upper", hi * rel_err)?,
        *params,
        dom,
    )
}

/// Upper bound of the p = 2 family on a ball of radius `inradius`.
pub(crate) fn p2_ball_upper(params: &Params, inradius: f64) -> Result<f64> {
    let (n, s, q) = (params.dim(), params.s, params.q);
    let g = gamma(s + 1.0)?;
    let bq = beta(0.5 * n, q * s + 1.0)?;
    Ok(2f64.powf(2.0 * s + 2.0 / q) * (unit_ball_volume(params.n) * n).powf(1.0 - 2.0 / q) / (n + 2.0 * s)
        * g
        * g
        * bq.powf(-2.0 / q)
        * inradius.powf(dilation_exponent(params)))
}

/// p = 2, N > 2s on a bounded domain.
pub fn p2_domain_bounds(params: &Params, dom: &DomainSpec) -> Result<BoundPair> {
    params.require(Regime::P2)?;
    let (measure, inradius) = dom.bounded_parts(params)?;
    let crit = frac_sobolev_hilbert(params.n, params.s)?;
    let lo = crit.value * measure.powf(dilation_exponent(params) / params.dim());
    let hi = p2_ball_upper(params, inradius)?;
    BoundPair::new(lower(lo, "p2-domain-lower", 0.0)?, upper(hi, "p2-domain-upper", 0.0)?, *params, *dom)
}

/// p = 2, N > 2s on the whole space, 2 ≤ q < 2_s*.
pub fn p2_wholespace_bounds(params: &Params) -> Result<BoundPair> {
    params.require(Regime::P2)?;
    let dom = DomainSpec::whole_space(params.n, 1.0)?;
    if params.q < 2.0 {
        return Err(Error::Regime(format!("whole-space p = 2 bounds need q >= 2, got {}", params.q)));
    }
    if params.q == 2.0 {
        return exact_one(*params, dom);
    }
    let crit = frac_sobolev_hilbert(params.n, params.s)?;
    let (n, s, q) = (params.dim(), params.s, params.q);
    let kappa = n / s;
    // x = 1/q − 1/2_s*, y = 1/2 − 1/q
    let x = (2.0 * n - q * (n - 2.0 * s)) / (2.0 * n * q);
    let y = (q - 2.0) / (2.0 * q);
    let split = young_lower(kappa * x, crit.value)?;
    let lo = 1.0 / split.rho;
    let g = gamma(s + 1.0)?;
    let bq = beta(0.5 * n, q * s + 1.0)?;
    let b2 = beta(0.5 * n, 2.0 * s + 1.0)?;
    let hi = unit_ball_volume(params.n).powf(1.0 - 2.0 / q)
        * s
        * (2f64.powf(2.0 * s + 1.0 - 2.0 * s / n) * g * g / ((n + 2.0 * s) * y)).powf(kappa * y)
        * (n * bq).powf(-2.0 / q)
        * (b2 / x).powf(kappa * x);
    BoundPair::new(lower(lo, "p2-whole-space-lower", 0.0)?, upper(hi, "p2-whole-space-upper", 0.0)?, *params, dom)
}

fn check_q(q: f64, min: f64, strict: bool) -> Result<()> {
    let ok = if strict { q > min } else { q >= min };
    if ok && q.is_finite() {
        Ok(())
    } else {
        domain(format!("q must be {} {min}, got {q}", if strict { ">" } else { ">=" }))
    }
}

/// Line case s = 1/2: upper bound 2^{1−2/q}πe/q · R^{−2/q} on a domain of inradius R.
pub fn limiting_domain_upper(q: f64, inradius: f64) -> Result<ConstantValue> {
    check_q(q, 1.0, false)?;
    if !(inradius > 0.0) {
        return domain(format!("inradius must be positive, got {inradius}"));
    }
    let value = 2f64.powf(1.0 - 2.0 / q) * PI * E / q * inradius.powf(-2.0 / q);
    upper(value, "limiting-domain-upper", 0.0)
}

/// Line case s = 1/2: lower bound through a Trudinger–Moser constant `c1`.
pub fn limiting_domain_lower(q: f64, measure: f64, c1: f64) -> Result<ConstantValue> {
    check_q(q, 1.0, false)?;
    if !(measure > 0.0) || !(c1 > 0.0) {
        return domain("measure and C1 must be positive");
    }
    let value = PI * (-2.0 / q * (c1.ln() + ln_gamma(0.5 * q + 1.0)? + measure.ln())).exp();
    lower(value, "limiting-domain-lower", 0.0)
}

/// Line case s = 1/2 on ℝ: upper bound 2^{1−4/q}π^{1−2/q}q(q−2)^{4/q−2}e^{(q−2)/q}.
pub fn limiting_wholespace_upper(q: f64) -> Result<ConstantValue> {
    check_q(q, 2.0, true)?;
    let value = 2f64.powf(1.0 - 4.0 / q)
        * PI.powf(1.0 - 2.0 / q)
        * q
        * (q - 2.0).powf(4.0 / q - 2.0)
        * ((q - 2.0) / q).exp();
    upper(value, "limiting-whole-space-upper", 0.0)
}

/// Exact value at q = 2 on ℝ for s = 1/2, reached by the K → ∞ limit of
/// the Moser-type family.
pub fn limiting_wholespace_q2() -> Result<ConstantValue> {
    upper(1.0, "exact-endpoint", 0.0)
}

/// Line case s = 1/2 on ℝ: lower bound through a Trudinger–Moser constant `c2`.
pub fn limiting_wholespace_lower(q: f64, c2: f64) -> Result<ConstantValue> {
    check_q(q, 2.0, true)?;
    if !(c2 > 0.0) {
        return domain("C2 must be positive");
    }
    // ln of (C2 + 2)π^{−q/2}Γ(q/2 + 1) + 2^{2−q/2}/(q − 2), summed in log space
    let a = (c2 + 2.0).ln() - 0.5 * q * PI.ln() + ln_gamma(0.5 * q + 1.0)?;
    let b = (2.0 - 0.5 * q) * 2f64.ln() - (q - 2.0).ln();
    let ln_inner = a.max(b) + (-(a - b).abs()).exp().ln_1p();
    lower((-2.0 / q * ln_inner).exp(), "limiting-whole-space-lower", 0.0)
}

/// Line case s = 1/2 bracket on a bounded domain, with caller-supplied C1.
pub fn limiting_domain_bounds(params: &Params, dom: &DomainSpec, c1: f64) -> Result<BoundPair> {
    params.require(Regime::Limiting)?;
    let (measure, inradius) = dom.bounded_parts(params)?;
    BoundPair::new(
        limiting_domain_lower(params.q, measure, c1)?,
        limiting_domain_upper(params.q, inradius)?,
        *params,
        *dom,
    )
}

/// Line case s = 1/2 bracket on ℝ for q ≥ 2, with caller-supplied C2.
pub fn limiting_wholespace_bounds(params: &Params, c2: f64) -> Result<BoundPair> {
    params.require(Regime::Limiting)?;
    let dom = DomainSpec::whole_space(1, 1.0)?;
    if params.q == 2.0 {
        return exact_one(*params, dom);
    }
    if params.q < 2.0 {
        return Err(Error::Regime(format!("whole-space line bounds need q >= 2, got {}", params.q)));
    }
    BoundPair::new(limiting_wholespace_lower(params.q, c2)?, limiting_wholespace_upper(params.q)?, *params, dom)
}

/// Trudinger–Moser constants used by the line-case lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoserConstants {
    pub c1: f64,
    pub c2: f64,
}

impl Default for MoserConstants {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0 }
    }
}

/// Bracket for any supported parameter point and domain.
pub fn bounds_for(params: &Params, dom: &DomainSpec, tm: MoserConstants) -> Result<BoundPair> {
    let bounded = dom.is_bounded();
    match (params.regime(), bounded) {
        (Regime::P1, true) => p1_domain_bounds(params, dom),
        (Regime::P1, false) => p1_wholespace_bounds(params).map(|b| BoundPair { domain: *dom, ..b }),
        (Regime::P2, true) => p2_domain_bounds(params, dom),
        (Regime::P2, false) => p2_wholespace_bounds(params).map(|b| BoundPair { domain: *dom, ..b }),
        (Regime::Limiting, true) => limiting_domain_bounds(params, dom, tm.c1),
        (Regime::Limiting, false) => limiting_wholespace_bounds(params, tm.c2).map(|b| BoundPair { domain: *dom, ..b }),
        (Regime::OutOfScope, _) => Err(Error::Regime(format!("{params:?} is outside every bound family"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn dilation_examples() {
        let p = Params::new(1, 0.25, 2.0, 3.0).unwrap();
        assert_eq!(dilation_transfer(1.7, 1.0, &p).unwrap(), 1.7);
        assert!(rel(dilation_transfer(1.0, 2.0, &p).unwrap(), 2f64.powf(2.0 * (0.25 - 1.0 / 3.0))) < 1e-14);
        assert!(dilation_transfer(1.0, 0.0, &p).is_err());
        let crit = Params::new(3, 0.5, 2.0, 3.0).unwrap();
        assert_eq!(dilation_transfer(2.5, 7.0, &crit).unwrap(), 2.5);
        let lim = Params::new(1, 0.5, 2.0, 4.0).unwrap();
        assert!(rel(dilation_transfer(1.0, 3.0, &lim).unwrap(), 3f64.powf(-0.5)) < 1e-14);
    }

    #[test]
    fn young_half() {
        let y = young_lower(0.5, 1.0).unwrap();
        assert!(rel(y.rho, 0.5) < 1e-15);
        assert!(young_lower(0.0, 1.0).is_err());
        assert!(young_lower(1.0, 1.0).is_err());
    }

    #[test]
    fn p1_ball_is_exact() {
        let p = Params::new(2, 0.5, 1.0, 1.2).unwrap();
        let b = p1_domain_bounds(&p, &DomainSpec::ball(2, 1.0).unwrap()).unwrap();
        assert_eq!(b.lower.value, b.upper.value);
    }

    #[test]
    fn p1_interval_value() {
        let p = Params::new(1, 0.5, 1.0, 1.5).unwrap();
        let b = p1_domain_bounds(&p, &DomainSpec::interval(-1.0, 1.0).unwrap()).unwrap();
        assert!(rel(b.lower.value, 16.0 * 2f64.powf(0.5 - 2.0 / 3.0)) < 1e-9);
    }

    #[test]
    fn exact_endpoints() {
        let b = p1_wholespace_bounds(&Params::new(2, 0.3, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!((b.lower.value, b.upper.value), (1.0, 1.0));
        let b = p2_wholespace_bounds(&Params::new(1, 0.25, 2.0, 2.0).unwrap()).unwrap();
        assert_eq!((b.lower.value, b.upper.value), (1.0, 1.0));
        assert_eq!(limiting_wholespace_q2().unwrap().value, 1.0);
    }

    #[test]
    fn p2_domain_value() {
        let p = Params::new(1, 0.25, 2.0, 3.0).unwrap();
        let b = p2_domain_bounds(&p, &DomainSpec::interval(-1.0, 1.0).unwrap()).unwrap();
        let s = frac_sobolev_hilbert(1, 0.25).unwrap().value;
        assert!(rel(b.lower.value, s * 2f64.powf(2.0 * (0.25 - 1.0 / 3.0))) < 1e-13);
        assert!(rel(b.lower.value, 0.7548) < 1e-3);
    }

    #[test]
    fn p2_wholespace_lower_matches_display() {
        let (n, s, q) = (3u32, 0.5, 2.5);
        let p = Params::new(n, s, 2.0, q).unwrap();
        let b = p2_wholespace_bounds(&p).unwrap();
        let nf = n as f64;
        let crit_exp = 2.0 * nf / (nf - 2.0 * s);
        let k = nf / s;
        let display = (k * (1.0 / q - 1.0 / crit_exp)).powf(k * (1.0 / crit_exp - 1.0 / q))
            * (k * (0.5 - 1.0 / q)).powf(k * (1.0 / q - 0.5))
            * frac_sobolev_hilbert(n, s).unwrap().value.powf(k * (0.5 - 1.0 / q));
        assert!(rel(b.lower.value, display) < 1e-13);
    }

    #[test]
    fn limiting_values() {
        assert!(rel(limiting_domain_upper(4.0, 1.0).unwrap().value, 2f64.sqrt() * PI * E / 4.0) < 1e-14);
        let r = limiting_domain_upper(3.0, 2.0).unwrap().value / limiting_domain_upper(3.0, 1.0).unwrap().value;
        assert!(rel(r, 2f64.powf(-2.0 / 3.0)) < 1e-14);
        assert!(rel(limiting_domain_lower(2.0, 2.0, 1.0).unwrap().value, PI / 2.0) < 1e-14);
        assert!(limiting_domain_lower(3.0, 2.0, 2.0).unwrap().value < limiting_domain_lower(3.0, 2.0, 1.0).unwrap().value);
        assert!(rel(limiting_wholespace_upper(4.0).unwrap().value, 2.0 * (PI * E).sqrt()) < 1e-14);
        assert!(limiting_wholespace_upper(2.0).is_err());
        assert!(limiting_wholespace_lower(2.0, 1.0).is_err());
        let direct = (3.0 * PI.powi(-2) * 2.0 + 1.0 / 2.0f64).powf(-0.5);
        assert!(rel(limiting_wholespace_lower(4.0, 1.0).unwrap().value, direct) < 1e-14);
    }

    #[test]
    fn domain_spec_invariants() {
        let b = DomainSpec::ball(3, 2.0).unwrap();
        assert_eq!(b.inradius, Some(2.0));
        assert!(rel(b.measure.unwrap(), unit_ball_volume(3) * 8.0) < 1e-15);
        let i = DomainSpec::interval(-1.0, 3.0).unwrap();
        assert_eq!((i.measure, i.inradius), (Some(4.0), Some(2.0)));
        assert!(DomainSpec::interval(1.0, 1.0).is_err());
        assert!(DomainSpec::whole_space(1, 8.0).unwrap().measure.is_none());
    }

    #[test]
    fn regime_errors() {
        let p = Params::new(1, 0.25, 2.0, 3.0).unwrap();
        assert!(matches!(p1_wholespace_bounds(&p), Err(Error::Regime(_))));
        assert!(matches!(p2_wholespace_bounds(&Params::new(1, 0.25, 2.0, 1.5).unwrap()), Err(Error::Regime(_))));
        let wrong_dim = p2_domain_bounds(&Params::new(2, 0.25, 2.0, 3.0).unwrap(), &DomainSpec::interval(0.0, 1.0).unwrap());
        assert!(wrong_dim.is_err());
    }
}
