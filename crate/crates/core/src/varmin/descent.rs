//! Preconditioned projected gradient descent for Rayleigh quotients
//!
//!   R(u) = (‖(−Δ)^{s/2}u‖² + ∫W u²) / (∫C |u|^q)^{2/q}
//!
//! with optional mass weight W and constraint weight C.

use serde::{Deserialize, Serialize};

use super::grid::{FracLaplacian, Mask};
use super::SolverConfig;
use crate::error::{Error, Result};

pub(crate) struct Problem<'a> {
    pub op: &'a FracLaplacian,
    pub mass: Option<&'a [f64]>,
    pub weight: Option<&'a [f64]>,
    pub q: f64,
    pub mask: Option<&'a Mask>,
}

pub(crate) struct Eval {
    pub quotient: f64,
    /// Gradient with respect to the grid inner product h·Σ.
    pub grad: Vec<f64>,
}

/// One accepted iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub quotient: f64,
    pub step: f64,
    pub rel_change: f64,
    /// Relative growth of the numerator caused by the |·| projection (0 when no sign flip).
    pub positivity_excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Relative change stayed below tolerance for three consecutive steps.
    Converged,
    /// Line search could not decrease the quotient further in floating point.
    Stalled,
    /// A caller-supplied stopping test fired.
    Target,
    MaxIters,
}

impl<'a> Problem<'a> {
    fn h(&self) -> f64 {
        self.op.grid().spacing()
    }

    fn numerator_only(&self, u: &[f64]) -> f64 {
        let mut au = self.op.apply(u);
        if let Some(w) = self.mass {
            for ((a, &x), &wi) in au.iter_mut().zip(u).zip(w) {
                *a += wi * x;
            }
        }
        self.h() * u.iter().zip(&au).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn constraint(&self, u: &[f64]) -> f64 {
        let q = self.q;
        let sum: f64 = match self.weight {
            Some(c) => u.iter().zip(c).map(|(x, ci)| ci * x.abs().powf(q)).sum(),
            None => u.iter().map(|x| x.abs().powf(q)).sum(),
        };
        self.h() * sum
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<Eval> {
        let h = self.h();
        let q = self.q;
        let mut au = self.op.apply(u);
        if let Some(w) = self.mass {
            for ((a, &x), &wi) in au.iter_mut().zip(u).zip(w) {
                *a += wi * x;
            }
        }
        let numerator = h * u.iter().zip(&au).map(|(a, b)| a * b).sum::<f64>();
        let constraint = self.constraint(u);
        if !(constraint > f64::MIN_POSITIVE) || !constraint.is_finite() {
            return Err(Error::Degenerate(format!("L^q mass {constraint} underflowed")));
        }
        let den = constraint.powf(2.0 / q);
        let quotient = numerator / den;
        let coef = quotient * 2.0 * constraint.powf(2.0 / q - 1.0);
        let grad = au
            .iter()
            .zip(u)
            .enumerate()
            .map(|(j, (a, &x))| {
                let c = self.weight.map_or(1.0, |w| w[j]);
                (2.0 * a - coef * c * x.abs().powf(q - 2.0) * x) / den
            })
            .collect();
        Ok(Eval { quotient, grad })
    }

    /// Support mask, optional |·|, then normalization to unit constraint.
    pub fn project(&self, v: &mut [f64], positivity: bool) -> Result<()> {
        if positivity {
            v.iter_mut().for_each(|x| *x = x.abs());
        }
        if let Some(m) = self.mask {
            m.apply_in_place(v);
        }
        let c = self.constraint(v);
        if !(c > f64::MIN_POSITIVE) || !c.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize a field with L^q mass {c}")));
        }
        let scale = c.powf(-1.0 / self.q);
        v.iter_mut().for_each(|x| *x *= scale);
        Ok(())
    }

    fn masked(&self, g: &[f64]) -> Vec<f64> {
        let mut out = g.to_vec();
        if let Some(m) = self.mask {
            m.apply_in_place(&mut out);
        }
        out
    }

    fn positivity_excess(&self, w: &[f64]) -> f64 {
        if w.iter().all(|&x| x >= 0.0) {
            return 0.0;
        }
        let before = self.numerator_only(w);
        let abs: Vec<f64> = w.iter().map(|x| x.abs()).collect();
        let after = self.numerator_only(&abs);
        (after - before) / before.abs().max(f64::MIN_POSITIVE)
    }

    /// Runs the descent from `u` (already projected). `stop` is consulted
    /// after every accepted step with the current iterate and quotient.
    pub fn descend(
        &self,
        mut u: Vec<f64>,
        cfg: &SolverConfig,
        mut stop: impl FnMut(&[f64], f64) -> bool,
    ) -> Result<(Vec<f64>, f64, Vec<TraceEntry>, Termination)> {
        let h = self.h();
        let mut cur = self.evaluate(&u)?;
        let mut tau = cfg.initial_step;
        let mut trace = Vec::new();
        let mut small = 0;
        for iteration in 0..cfg.max_iters {
            let g = self.masked(&cur.grad);
            let d = self.masked(&self.op.precondition(&g));
            let slope = h * cur.grad.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
            if !(slope > 0.0) {
                return Ok((u, cur.quotient, trace, Termination::Stalled));
            }
            let mut t = (2.0 * tau).min(cfg.max_step);
            let accepted = loop {
                let mut w: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - t * b).collect();
                if let Some(m) = self.mask {
                    m.apply_in_place(&mut w);
                }
                let excess = if cfg.positivity { self.positivity_excess(&w) } else { 0.0 };
                let mut v = w;
                self.project(&mut v, cfg.positivity)?;
                let next = self.evaluate(&v)?;
                if next.quotient <= cur.quotient - cfg.armijo * t * slope {
                    break Some((v, next, excess));
                }
                t *= cfg.shrink;
                if t < cfg.min_step {
                    break None;
                }
            };
            let Some((v, next, excess)) = accepted else {
                return Ok((u, cur.quotient, trace, Termination::Stalled));
            };
            if next.quotient > cur.quotient {
                return Err(Error::Config("accepted step increased the quotient".into()));
            }
            let rel_change = (cur.quotient - next.quotient) / cur.quotient.abs();
            trace.push(TraceEntry { iteration, quotient: next.quotient, step: t, rel_change, positivity_excess: excess });
            u = v;
            cur = next;
            tau = t;
            if stop(&u, cur.quotient) {
                return Ok((u, cur.quotient, trace, Termination::Target));
            }
            small = if rel_change < cfg.quotient_tol { small + 1 } else { 0 };
            if small >= 3 {
                return Ok((u, cur.quotient, trace, Termination::Converged));
            }
        }
        Ok((u, cur.quotient, trace, Termination::MaxIters))
    }
}
