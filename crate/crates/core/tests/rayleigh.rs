mod common;

use std::f64::consts::{E, PI};

use common::*;
use frasob::bounds::{limiting_domain_upper, limiting_wholespace_upper, p1_wholespace_bounds, p2_wholespace_bounds};
use frasob::constants::{norm_bridge, Params};
use frasob::rayleigh::*;
use frasob::specfun::QuadratureConfig;
use frasob::varmin::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n: u32, s: f64, p: f64, q: f64) -> Params {
    Params::new(n, s, p, q).unwrap()
}

fn two_power_cases() -> Vec<(Objective, Params)> {
    vec![
        (Objective::P1WholeSpace, params(1, 0.5, 1.0, 1.5)),
        (Objective::P1WholeSpace, params(2, 0.3, 1.0, 1.1)),
        (Objective::P1WholeSpace, params(3, 0.8, 1.0, 1.2)),
        (Objective::P2WholeSpace, params(1, 0.25, 2.0, 3.0)),
        (Objective::P2WholeSpace, params(3, 0.5, 2.0, 2.5)),
        (Objective::P2WholeSpace, params(2, 0.3, 2.0, 2.5)),
        (Objective::P2WholeSpace, params(4, 0.9, 2.0, 2.2)),
    ]
}

#[test]
fn two_power_argmins_match_golden_section() {
    for (which, pp) in two_power_cases() {
        let closed = objective_argmin(which, &pp).unwrap();
        let searched = two_power_argmin(which, &pp);
        assert!(rel(closed.k, searched) < 1e-8, "{which:?} {pp:?}: {} vs {searched}", closed.k);
        // Closed-form value agrees with the direct evaluation of the terms.
        let [(a_c, a), (b_c, b)] = objective_terms(which, &pp).unwrap();
        let direct = a_c * closed.k.powf(a) + b_c * closed.k.powf(b);
        assert!(rel(closed.value, direct) < 1e-14);
        let upper = match which {
            Objective::P1WholeSpace => p1_wholespace_bounds(&pp).unwrap().upper.value,
            _ => p2_wholespace_bounds(&pp).unwrap().upper.value,
        };
        assert!(rel(closed.value, upper) < 1e-12, "{which:?} {pp:?}");
    }
}

#[test]
fn line_case_argmins_match_golden_section() {
    for q in [1.5, 2.0, 4.0, 8.0, 32.0] {
        let pp = params(1, 0.5, 2.0, q);
        let closed = objective_argmin(Objective::LimitingDomain, &pp).unwrap();
        assert_eq!(closed.big_k, Some(1.0));
        assert!(rel(closed.k, limiting_domain_argmin(q)) < 1e-8, "q={q}");
        assert!(rel(closed.value, limiting_domain_upper(q, 1.0).unwrap().value) < 1e-12);
    }
    for q in [2.5, 3.0, 4.0, 8.0, 32.0] {
        let pp = params(1, 0.5, 2.0, q);
        let closed = objective_argmin(Objective::LimitingWholeSpace, &pp).unwrap();
        let (k, big_k) = limiting_whole_space_argmin(q);
        assert!(rel(closed.k, k) < 1e-8, "q={q}: {} vs {k}", closed.k);
        assert!(rel(closed.big_k.unwrap(), big_k) < 1e-8, "q={q}");
        assert!(rel(closed.value, limiting_wholespace_upper(q).unwrap().value) < 1e-12, "q={q}");
    }
}

#[test]
fn argmins_beat_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (which, pp) in two_power_cases() {
        let best = objective_argmin(which, &pp).unwrap();
        for _ in 0..100 {
            let k = best.k * (rng.gen_range(-5.0..5.0f64)).exp();
            assert!(best.value <= objective(which, &pp, k, None).unwrap() * (1.0 + 1e-14));
        }
    }
    for q in [3.0, 6.0] {
        let pp = params(1, 0.5, 2.0, q);
        let dom = objective_argmin(Objective::LimitingDomain, &pp).unwrap();
        let whole = objective_argmin(Objective::LimitingWholeSpace, &pp).unwrap();
        for _ in 0..100 {
            let k = rng.gen_range(1e-6..0.999f64);
            let big_k = rng.gen_range(k..1.0f64).max(k * (1.0 + 1e-9));
            assert!(dom.value <= objective(Objective::LimitingDomain, &pp, k, Some(big_k)).unwrap() * (1.0 + 1e-14));
            let k = (rng.gen_range(-15.0..3.0f64)).exp();
            let big_k = k * (rng.gen_range(0.01..20.0f64)).exp();
            assert!(whole.value <= objective(Objective::LimitingWholeSpace, &pp, k, Some(big_k)).unwrap() * (1.0 + 1e-14));
        }
    }
    let pp = params(1, 0.5, 2.0, 4.0);
    assert!(objective(Objective::LimitingDomain, &pp, 0.1, Some(1.5)).is_err());
    assert!(objective(Objective::LimitingDomain, &pp, 0.1, None).is_err());
    assert!(objective_terms(Objective::LimitingDomain, &pp).is_err());
}

#[test]
fn bump_quotient_scaling_in_radius() {
    for (n, s) in [(1u32, 0.25), (2, 0.5), (3, 0.7)] {
        let nf = n as f64;
        let crit = 2.0 * nf / (nf - 2.0 * s);
        let at_one = bump_quotient(n, s, crit, 1.0).unwrap();
        for k in [0.1, 0.5, 3.0, 40.0] {
            assert!(rel(bump_quotient(n, s, crit, k).unwrap(), at_one) < 1e-12, "N={n} k={k}");
        }
        for q in [1.5, 0.5 * (2.0 + crit), crit + 1.0] {
            let exponent = 2.0 * nf * (1.0 / crit - 1.0 / q);
            let lo = bump_quotient(n, s, q, 1.0).unwrap();
            let hi = bump_quotient(n, s, q, 2.0).unwrap();
            assert!(rel(hi / lo, 2f64.powf(exponent)) < 1e-12);
            assert_eq!(hi > lo, exponent > 0.0, "N={n} q={q}");
        }
    }
}

#[test]
fn bump_norms_against_grid_oracles() {
    let (s, q, k) = (0.25, 3.0, 1.0);
    let grid = Grid::new(8.0, 1 << 14).unwrap();
    let field = RadialProfile::bump(k, s).unwrap().sample(grid).unwrap();
    let spectral = halflap_norm_sq(&field, s).unwrap();
    assert!(rel(spectral, bump_seminorm_sq(1, s, k).unwrap()) < 1e-3, "{spectral}");
    assert!(rel(field.lq_norm(q), bump_lq_norm(1, s, q, k).unwrap()) < 1e-3);
    let cfg = QuadratureConfig::default();
    let quad = RadialProfile::bump(k, s).unwrap().lp_norm_pow_1d(q, &cfg).unwrap();
    assert!(rel(quad, bump_lq_norm(1, s, q, k).unwrap().powf(q)) < 1e-10);
}

#[test]
fn bump_gagliardo_matches_bridge() {
    let cfg = QuadratureConfig::with_tolerances(1e-12, 1e-9);
    for s in [0.25, 0.4] {
        let bump = RadialProfile::bump(1.0, s).unwrap();
        let gag = gagliardo_seminorm_1d(&bump, s, 2.0, &cfg).unwrap();
        let expect = 2.0 / norm_bridge(1, s).unwrap().value * bump_seminorm_sq(1, s, 1.0).unwrap();
        assert!(rel(gag, expect) < 1e-4, "s={s}: {gag} vs {expect}");
    }
}

#[test]
fn ball_indicator_seminorm_scaling() {
    let cfg = QuadratureConfig::default();
    for s in [0.25, 0.5, 0.75] {
        let base = gagliardo_seminorm_1d(&RadialProfile::char_ball(1.0).unwrap(), s, 1.0, &cfg).unwrap();
        assert!(rel(base, 4.0 * 2f64.powf(1.0 - s) / (s * (1.0 - s))) < 1e-8);
        for k in [0.5, 2.0] {
            let v = gagliardo_seminorm_1d(&RadialProfile::char_ball(k).unwrap(), s, 1.0, &cfg).unwrap();
            assert!(rel(v / base, k.powf(1.0 - s)) < 1e-4, "s={s} k={k}");
        }
    }
}

#[test]
fn moser_lattice_slack() {
    let cfg = QuadratureConfig::with_tolerances(1e-12, 1e-9);
    let mut lattice = vec![((-2.0f64).exp(), 1.0), ((-4.0f64).exp(), 1.0)];
    for k in [0.05, 0.3, 0.9] {
        for big_k in [1.0, 2.5] {
            lattice.push((k, big_k));
        }
    }
    lattice.push((0.99, 1.0));
    lattice.push((1e-3, 10.0));
    assert_eq!(lattice.len(), 10);
    for (k, big_k) in lattice {
        let c = moser_bound_check(k, big_k, &cfg).unwrap();
        assert!(c.slack >= 0.0, "k={k} K={big_k}: {c:?}");
        assert!(c.numeric_seminorm > 0.0);
    }
    assert!(moser_bound_check(1.0, 0.5, &cfg).is_err());
}

#[test]
fn bessel_reduction_identity() {
    let cfg = QuadratureConfig::with_tolerances(1e-13, 1e-11);
    for (n, s, k, xi) in [(1u32, 0.25, 1.0, 0.3), (2, 0.5, 1.0, 1.7), (3, 0.5, 1.0, 0.7), (4, 0.8, 2.0, 0.2)] {
        let (lhs, rhs) = bump_bessel_identity(n, s, k, xi, &cfg).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1e-3), "{n} {s} {k} {xi}: {lhs} {rhs}");
    }
}

#[test]
fn profiles_and_asymptote() {
    assert!(rel(LIMITING_ASYMPTOTE, 2.0 * PI * E) < 1e-15);
    let m = RadialProfile::moser(0.2, 1.0).unwrap();
    assert!(rel(m.eval(0.1), 5f64.ln()) < 1e-15);
    assert!(rel(m.eval(0.5), 2f64.ln()) < 1e-15);
    assert_eq!(m.eval(1.0), 0.0);
    assert!(m.fits_unit_ball());
    assert_eq!(RadialProfile::char_ball(1.0).unwrap().eval(0.5), 1.0);
    assert!(rel(RadialProfile::bump(2.0, 0.5).unwrap().eval(1.0), 3f64.sqrt()) < 1e-15);
    let json = serde_json::to_string(&m).unwrap();
    assert_eq!(serde_json::from_str::<RadialProfile>(&json).unwrap(), m);
}
