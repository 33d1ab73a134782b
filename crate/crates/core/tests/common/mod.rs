#![allow(dead_code)]

use std::f64::consts::PI;

use frasob::constants::Params;
use frasob::rayleigh::{objective_terms, Objective};

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on [lo, hi] driven by `diff(x1, x2) = f(x2) − f(x1)`.
///
/// Supplying the difference directly lets callers evaluate it without the
/// cancellation of subtracting two nearly equal values, so the bracket keeps
/// shrinking well past √ε.
pub fn golden_min(diff: impl Fn(f64, f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    for _ in 0..400 {
        if hi - lo <= 4.0 * f64::EPSILON * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if diff(c, d) > 0.0 {
            hi = d;
            d = c;
            c = hi - INV_PHI * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + INV_PHI * (hi - lo);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizer in k of A k^a + B k^b, searched in ln k.
pub fn two_power_argmin(which: Objective, params: &Params) -> f64 {
    let [(a_c, a), (b_c, b)] = objective_terms(which, params).unwrap();
    let diff = |x1: f64, x2: f64| {
        let dx = x2 - x1;
        a_c * (a * x1).exp() * (a * dx).exp_m1() + b_c * (b * x1).exp() * (b * dx).exp_m1()
    };
    golden_min(diff, -40.0, 40.0).exp()
}

/// Minimizer in k of k^{−2/q}/ln(1/k) on (0, 1), the outer radius pinned at 1.
pub fn limiting_domain_argmin(q: f64) -> f64 {
    // x = ln k < 0; f ∝ e^{−2x/q}/(−x), so f(x2)/f(x1) = exp(−2Δ/q)·x1/x2.
    let diff = |x1: f64, x2: f64| {
        let dx = x2 - x1;
        (-2.0 * dx / q + (-dx / x2).ln_1p()).exp_m1()
    };
    golden_min(diff, -10.0 * q, -1e-6).exp()
}

// Best gap d = ln K − ln k for a given ln k; the optimum sits near (q − 2)/2.
fn inner_gap(q: f64, x: f64) -> f64 {
    let k = x.exp();
    // g(d) = π/d + 2k e^d; g(d2) − g(d1) = π(d1 − d2)/(d1 d2) + 2k e^{d1} expm1(d2 − d1).
    let diff = |d1: f64, d2: f64| PI * (d1 - d2) / (d1 * d2) + 2.0 * k * d1.exp() * (d2 - d1).exp_m1();
    golden_min(diff, 1e-9, q + 10.0)
}

/// Minimizer (k, K) of 2^{−2/q}k^{−2/q}[π/d + 2k e^d] with d = ln K − ln k,
/// by nested searches in ln k and d.
pub fn limiting_whole_space_argmin(q: f64) -> (f64, f64) {
    let a = -2.0 / q;
    let b = 1.0 - 2.0 / q;
    // h(x) = min_d e^{ax}π/d + 2e^{bx}e^d up to the constant 2^{−2/q}.
    // h(x2) − h(x1) = [g(x2, d1) − g(x1, d1)] + [g(x2, d2) − g(x2, d1)].
    let diff = |x1: f64, x2: f64| {
        let d1 = inner_gap(q, x1);
        let d2 = inner_gap(q, x2);
        let dx = x2 - x1;
        let shift = PI / d1 * (a * x1).exp() * (a * dx).exp_m1() + 2.0 * d1.exp() * (b * x1).exp() * (b * dx).exp_m1();
        let refit = (a * x2).exp() * PI * (d1 - d2) / (d1 * d2) + 2.0 * (b * x2).exp() * d1.exp() * (d2 - d1).exp_m1();
        shift + refit
    };
    let x = golden_min(diff, -20.0 * q, 10.0);
    let d = inner_gap(q, x);
    (x.exp(), (x + d).exp())
}
