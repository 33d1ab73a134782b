//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines print in order.

mod common;

use std::f64::consts::{E, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use frasob::bounds::*;
use frasob::constants::*;
use frasob::pde::*;
use frasob::rayleigh::*;
use frasob::specfun::QuadratureConfig;
use frasob::varmin::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(n: u32, s: f64, p: f64, q: f64) -> Params {
    Params::new(n, s, p, q).unwrap()
}

fn exact_endpoints() -> Outcome {
    let p1 = p1_wholespace_bounds(&params(2, 0.5, 1.0, 1.0)).map_err(|e| e.to_string())?;
    let p2 = p2_wholespace_bounds(&params(1, 0.25, 2.0, 2.0)).map_err(|e| e.to_string())?;
    let line = limiting_wholespace_q2().map_err(|e| e.to_string())?.value;
    let vals = [p1.lower.value, p1.upper.value, p2.lower.value, p2.upper.value, line];
    ensure(vals.iter().all(|&v| v == 1.0), || format!("{vals:?}"))?;
    Ok("p = 1 at q = 1, p = 2 at q = 2 and the line case at q = 2 all return exactly 1".into())
}

fn lieb_bridge() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=4u32 {
        for s in [0.1, 0.2, 0.3, 0.45] {
            if n as f64 <= 2.0 * s {
                continue;
            }
            let lieb = lieb_constant(n, s).unwrap().value;
            let other = 2.0 / norm_bridge(n, s).unwrap().value * frac_sobolev_hilbert(n, s).unwrap().value;
            worst = worst.max(rel(lieb, other));
            count += 1;
        }
    }
    ensure(worst <= 1e-10, || format!("max rel {worst:.2e}"))?;
    Ok(format!("{count} points, max rel {worst:.1e}"))
}

fn isoperimetric_line() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in [0.25, 0.5, 0.75] {
        let v = frac_isoperimetric(1, s).map_err(|e| e.to_string())?.value;
        worst = worst.max(rel(v, 4.0 / (s * (1.0 - s))));
    }
    ensure(worst <= 1e-6, || format!("max rel {worst:.2e}"))?;
    Ok(format!("max rel {worst:.1e}"))
}

fn classical_limit() -> Outcome {
    let frac = frac_sobolev_hilbert(3, 1.0 - 1e-4).unwrap().value;
    let classical = classical_sobolev(3, 2.0).unwrap().value;
    let r = rel(frac, classical);
    ensure(r <= 0.01, || format!("{frac} vs {classical}"))?;
    Ok(format!("{frac:.6} vs {classical:.6}, rel {r:.1e}"))
}

fn bump_oracles() -> Outcome {
    let (n, s, q, k) = (1, 0.25, 3.0, 1.0);
    let grid = Grid::new(8.0, 1 << 14).unwrap();
    let bump = RadialProfile::bump(k, s).unwrap();
    let field = bump.sample(grid).unwrap();
    let semi = bump_seminorm_sq(n, s, k).unwrap();
    let lq = bump_lq_norm(n, s, q, k).unwrap();
    let spectral = rel(halflap_norm_sq(&field, s).unwrap(), semi);
    let grid_lq = rel(field.lq_norm(q), lq);
    let quad = rel(bump.lp_norm_pow_1d(q, &QuadratureConfig::default()).unwrap().powf(1.0 / q), lq);
    ensure(spectral <= 1e-3 && grid_lq <= 1e-3 && quad <= 1e-3, || format!("{spectral:.1e} {grid_lq:.1e} {quad:.1e}"))?;
    Ok(format!("seminorm rel {spectral:.1e} (spectral), L^q rel {grid_lq:.1e} (grid) / {quad:.1e} (quadrature)"))
}

fn argmins() -> Outcome {
    let mut k_err: f64 = 0.0;
    let mut v_err: f64 = 0.0;
    for pp in [params(1, 0.5, 1.0, 1.5), params(2, 0.3, 1.0, 1.1), params(3, 0.8, 1.0, 1.2)] {
        let a = objective_argmin(Objective::P1WholeSpace, &pp).unwrap();
        k_err = k_err.max(rel(a.k, two_power_argmin(Objective::P1WholeSpace, &pp)));
        v_err = v_err.max(rel(a.value, p1_wholespace_bounds(&pp).unwrap().upper.value));
    }
    for pp in [params(1, 0.25, 2.0, 3.0), params(3, 0.5, 2.0, 2.5), params(2, 0.3, 2.0, 2.5)] {
        let a = objective_argmin(Objective::P2WholeSpace, &pp).unwrap();
        k_err = k_err.max(rel(a.k, two_power_argmin(Objective::P2WholeSpace, &pp)));
        v_err = v_err.max(rel(a.value, p2_wholespace_bounds(&pp).unwrap().upper.value));
    }
    for q in [2.0, 4.0, 16.0] {
        let a = objective_argmin(Objective::LimitingDomain, &params(1, 0.5, 2.0, q)).unwrap();
        k_err = k_err.max(rel(a.k, limiting_domain_argmin(q)));
        v_err = v_err.max(rel(a.value, limiting_domain_upper(q, 1.0).unwrap().value));
    }
    for q in [3.0, 4.0, 16.0] {
        let a = objective_argmin(Objective::LimitingWholeSpace, &params(1, 0.5, 2.0, q)).unwrap();
        let (k, big_k) = limiting_whole_space_argmin(q);
        k_err = k_err.max(rel(a.k, k)).max(rel(a.big_k.unwrap(), big_k));
        v_err = v_err.max(rel(a.value, limiting_wholespace_upper(q).unwrap().value));
    }
    ensure(k_err <= 1e-8 && v_err <= 1e-12, || format!("argmin rel {k_err:.1e}, value rel {v_err:.1e}"))?;
    Ok(format!("argmin vs golden section max rel {k_err:.1e}; minimum vs bound max rel {v_err:.1e}"))
}

fn sandwiches() -> Outcome {
    let cfg = SandwichConfig::default();
    let mut lines = Vec::new();
    for (label, dom) in [("interval", DomainSpec::interval(-1.0, 1.0).unwrap()), ("line", DomainSpec::whole_space(1, 200.0).unwrap())] {
        for q in [2.5, 3.0, 3.5] {
            let r = sandwich(&params(1, 0.25, 2.0, q), &dom, &cfg).map_err(|e| format!("{label} q={q}: {e}"))?;
            let x = r.numeric.as_ref().ok_or("no numeric estimate")?.value;
            let inside = x >= 0.98 * r.lower.value && x <= 1.02 * r.upper.value;
            ensure(inside, || format!("{label} q={q}: {} <= {x} <= {}", r.lower.value, r.upper.value))?;
            lines.push(format!("{label} q={q}: {:.4}<{x:.4}<{:.4}", r.lower.value, r.upper.value));
        }
    }
    for (n, s, q, rad) in [(1, 0.5, 1.5, 1.0), (2, 0.5, 1.2, 1.0), (3, 0.3, 1.05, 2.0)] {
        let r = sandwich(&params(n, s, 1.0, q), &DomainSpec::ball(n, rad).unwrap(), &cfg).map_err(|e| e.to_string())?;
        let x = r.numeric.ok_or("no numeric value")?.value;
        ensure(x == r.lower.value && rel(r.upper.value, r.lower.value) <= ROUNDING_SLACK, || {
            format!("p=1 ball N={n}: {} {x} {}", r.lower.value, r.upper.value)
        })?;
    }
    lines.push("p=1 balls coincide".into());
    Ok(lines.join("; "))
}

fn asymptotics() -> Outcome {
    let target = 2.0 * PI * E;
    let dom = 1000.0 * limiting_domain_upper(1000.0, 1.0).unwrap().value;
    let r_dom = rel(dom, target);
    ensure(r_dom <= 5e-3, || format!("q*upper = {dom}"))?;
    let cfg = SandwichConfig { points: 1 << 16, ..SandwichConfig::default() };
    let r = sandwich(&params(1, 0.5, 2.0, 32.0), &DomainSpec::whole_space(1, 5.0).unwrap(), &cfg).map_err(|e| e.to_string())?;
    let numeric = 32.0 * r.numeric.ok_or("no numeric estimate")?.value;
    let r_num = rel(numeric, target);
    ensure(r_num <= 0.25, || format!("q*numeric = {numeric}"))?;
    Ok(format!("q*upper(1000) = {dom:.4} (rel {r_dom:.1e}); q*numeric(32) = {numeric:.3} (rel {r_num:.2})"))
}

fn moser() -> Outcome {
    let cfg = QuadratureConfig::with_tolerances(1e-12, 1e-9);
    let mut lattice = vec![((-2.0f64).exp(), 1.0), ((-4.0f64).exp(), 1.0)];
    for k in [0.05, 0.3, 0.9] {
        for big_k in [1.0, 2.5] {
            lattice.push((k, big_k));
        }
    }
    lattice.push((0.99, 1.0));
    lattice.push((1e-3, 10.0));
    let mut min_slack = f64::INFINITY;
    for &(k, big_k) in &lattice {
        let c = moser_bound_check(k, big_k, &cfg).map_err(|e| format!("k={k} K={big_k}: {e}"))?;
        ensure(c.slack >= 0.0, || format!("k={k} K={big_k}: slack {}", c.slack))?;
        min_slack = min_slack.min(c.slack);
    }
    Ok(format!("{} points, min slack {min_slack:.3}", lattice.len()))
}

fn ground_state() -> Outcome {
    let grid = Grid::new(40.0, 4096).unwrap();
    let v = Field::from_fn(grid, |_| 1.0).unwrap();
    let w = Field::from_fn(grid, |x| 1.0 + 2.0 * (-x * x).exp()).unwrap();
    let gs = ground_state_solve(&grid, 0.5, 4.0, &v, &w, &GroundStateConfig::default()).map_err(|e| e.to_string())?;
    let r = &gs.report;
    ensure(r.converged(), || format!("termination {:?}", r.termination))?;
    ensure(r.energy_monotone(), || "energy trace increased".into())?;
    ensure(r.min_value > 0.0, || format!("min value {}", r.min_value))?;
    ensure(r.residual < 1e-4, || format!("residual {}", r.residual))?;
    let s_num = minimize_quotient(&grid, None, 0.5, 4.0, Mode::WholeSpace, &SolverConfig::default())
        .map_err(|e| e.to_string())?
        .estimate;
    let (h_thr, _) = ground_state_thresholds(4.0, s_num).unwrap();
    ensure(r.h_norm_sq < h_thr, || format!("{} >= {h_thr}", r.h_norm_sq))?;
    Ok(format!("residual {:.1e}, ||u0||^2 = {:.4} < S^2 = {h_thr:.4} (S = {s_num:.4})", r.residual, r.h_norm_sq))
}

fn alpha_grid() -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (n, s) in [(1u32, 0.1), (1, 0.25), (1, 0.4), (2, 0.3), (2, 0.5), (2, 0.8), (3, 0.5), (3, 0.9), (4, 0.6), (4, 0.95)] {
        let nf = n as f64;
        let crit = 2.0 * nf / (nf - 2.0 * s);
        for t in [0.3, 0.7] {
            let q = 2.0 + t * (crit - 2.0);
            let lower = p2_wholespace_bounds(&params(n, s, 2.0, q)).unwrap().lower.value;
            let a = alpha_fraction(n, s, q, lower).map_err(|e| format!("N={n} s={s} q={q}: {e}"))?;
            ensure(a > 0.0 && a < 1.0, || format!("N={n} s={s} q={q}: alpha {a}"))?;
            let (lo, _) = lambda_interval(a).map_err(|e| e.to_string())?;
            ensure(lo > 0.0 && lo < 1.0, || format!("sqrt(1-alpha) = {lo}"))?;
            worst = worst.max(a);
            count += 1;
        }
    }
    Ok(format!("{count} points, max alpha {worst:.4}"))
}

fn pohozaev() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = Grid::new(5.0, 256).unwrap();
    let mut min_gap = f64::INFINITY;
    for _ in 0..100 {
        let u = Field::new(grid, (0..256).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        let v = Field::new(grid, (0..256).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        for lambda in [0.1, 0.5, 0.9] {
            let d = pohozaev_defect(&u, &v, lambda).unwrap();
            let floor = (1.0 - lambda) * (u.l2_norm_sq() + v.l2_norm_sq());
            ensure(d >= floor - 1e-12 * floor, || format!("{d} < {floor}"))?;
            min_gap = min_gap.min((d - floor) / floor);
        }
    }
    Ok(format!("300 cases, min relative margin {min_gap:.2e}"))
}

fn literature() -> Outcome {
    let mut count = 0;
    for n in 1..=4u32 {
        for i in 1..20 {
            let s = i as f64 / 20.0;
            if n as f64 <= 2.0 * s {
                continue;
            }
            let m = mazya_lower(n, s, 2.0).unwrap().value;
            let l = lieb_constant(n, s).unwrap().value;
            ensure(m <= l, || format!("N={n} s={s}: {m} > {l}"))?;
            count += 1;
        }
    }
    for q in [2.5, 3.0, 4.0, 8.0, 16.0, 64.0] {
        let ll = lieb_loss_lower(q).unwrap().value;
        let up = limiting_wholespace_upper(q).unwrap().value;
        ensure(ll <= up, || format!("q={q}: {ll} > {up}"))?;
    }
    Ok(format!("Maz'ya <= Lieb at {count} points; Lieb-Loss <= line upper at 6 exponents"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 13] = [
        ("exact whole-space endpoints", exact_endpoints, Duration::from_secs(1)),
        ("Lieb/bridge identity", lieb_bridge, Duration::from_secs(1)),
        ("1-D fractional isoperimetric closed form", isoperimetric_line, Duration::from_secs(5)),
        ("classical limit s -> 1", classical_limit, Duration::from_secs(1)),
        ("test-function oracles", bump_oracles, Duration::from_secs(10)),
        ("closed-form minimizers", argmins, Duration::from_secs(1)),
        ("sandwich verification", sandwiches, Duration::from_secs(120)),
        ("large-q asymptotics", asymptotics, Duration::from_secs(60)),
        ("Moser bound lattice", moser, Duration::from_secs(30)),
        ("ground state", ground_state, Duration::from_secs(120)),
        ("alpha threshold", alpha_grid, Duration::from_secs(1)),
        ("Pohozaev defect", pohozaev, Duration::from_secs(1)),
        ("literature bound consistency", literature, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}; over time budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{:.2}s]: {detail}", i + 1, took.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{:.2}s]: {detail}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
