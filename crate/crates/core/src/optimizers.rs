//! Derivative-free minimizers: SPSA and the Nelder–Mead simplex.
//!
//! Budgets count objective evaluations. Both methods report the best point
//! seen over every evaluation they made.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub best_theta: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// Optimizer iterations (SPSA updates or simplex transformations).
    pub iterations: usize,
    /// `(evaluation index, objective value)` for every evaluation.
    pub history: Vec<(usize, f64)>,
}

impl OptResult {
    /// Best-so-far value after each evaluation.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.history
            .iter()
            .map(|&(_, v)| {
                best = best.min(v);
                best
            })
            .collect()
    }
}

struct Tracker<F> {
    f: F,
    budget: usize,
    best_theta: Vec<f64>,
    best_value: f64,
    history: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> f64> Tracker<F> {
    fn new(f: F, budget: usize, theta0: &[f64]) -> Self {
        Self { f, budget, best_theta: theta0.to_vec(), best_value: f64::INFINITY, history: Vec::new() }
    }

    fn remaining(&self) -> usize {
        self.budget - self.history.len()
    }

    fn eval(&mut self, theta: &[f64]) -> Result<f64> {
        let v = (self.f)(theta);
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective returned {v}")));
        }
        self.history.push((self.history.len(), v));
        if v < self.best_value {
            self.best_value = v;
            self.best_theta.copy_from_slice(theta);
        }
        Ok(v)
    }

    fn finish(self, iterations: usize) -> OptResult {
        OptResult {
            best_theta: self.best_theta,
            best_value: self.best_value,
            evaluations: self.history.len(),
            iterations,
            history: self.history,
        }
    }
}

/// SPSA gain sequences `a_k = a / (k + 1 + A)^alpha`, `c_k = c / (k + 1)^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaGains {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`; `None` uses a tenth of the iteration count.
    pub stability: Option<f64>,
}

impl Default for SpsaGains {
    fn default() -> Self {
        Self { a: 0.1, c: 0.1, alpha: 0.602, gamma: 0.101, stability: None }
    }
}

fn check_budget(budget: usize, theta0: &[f64]) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidArgument("optimizer budget must be at least 1".into()));
    }
    if theta0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial parameters".into()));
    }
    Ok(())
}

/// Simultaneous-perturbation stochastic approximation with Rademacher
/// perturbations. The starting point is evaluated first; each iteration then
/// spends two evaluations, so `budget` allows `(budget - 1) / 2` iterations.
pub fn spsa_minimize<F, R>(f: F, theta0: &[f64], budget: usize, gains: &SpsaGains, rng: &mut R) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    check_budget(budget, theta0)?;
    let mut t = Tracker::new(f, budget, theta0);
    let mut theta = theta0.to_vec();
    t.eval(&theta)?;
    let max_iter = (budget - 1) / 2;
    let stability = gains.stability.unwrap_or(max_iter as f64 / 10.0);
    let mut delta = vec![0.0; theta.len()];
    let mut probe = vec![0.0; theta.len()];
    let mut iterations = 0;
    while t.remaining() >= 2 {
        let k = iterations as f64;
        let ak = gains.a / (k + 1.0 + stability).powf(gains.alpha);
        let ck = gains.c / (k + 1.0).powf(gains.gamma);
        for d in delta.iter_mut() {
            *d = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        for ((p, th), d) in probe.iter_mut().zip(&theta).zip(&delta) {
            *p = th + ck * d;
        }
        let plus = t.eval(&probe)?;
        for ((p, th), d) in probe.iter_mut().zip(&theta).zip(&delta) {
            *p = th - ck * d;
        }
        let minus = t.eval(&probe)?;
        let slope = (plus - minus) / (2.0 * ck);
        for (th, d) in theta.iter_mut().zip(&delta) {
            *th -= ak * slope * d;
        }
        iterations += 1;
    }
    Ok(t.finish(iterations))
}

/// Nelder–Mead with reflection 1, expansion 2, contraction 1/2 and shrink
/// 1/2, starting from the simplex `theta0 + 0.1 e_i`; runs until the
/// evaluation budget is spent.
pub fn simplex_minimize<F>(f: F, theta0: &[f64], budget: usize) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    const EDGE: f64 = 0.1;
    check_budget(budget, theta0)?;
    let dim = theta0.len();
    let mut t = Tracker::new(f, budget, theta0);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = t.eval(theta0)?;
    simplex.push((theta0.to_vec(), v0));
    for i in 0..dim {
        if t.remaining() == 0 {
            return Ok(t.finish(0));
        }
        let mut p = theta0.to_vec();
        p[i] += EDGE;
        let v = t.eval(&p)?;
        simplex.push((p, v));
    }
    if dim == 0 {
        return Ok(t.finish(0));
    }
    let mut iterations = 0;
    let mut centroid = vec![0.0; dim];
    let point = |c: &[f64], w: &[f64], coef: f64| -> Vec<f64> { c.iter().zip(w).map(|(c, w)| c + coef * (w - c)).collect() };
    'outer: while t.remaining() > 0 {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (p, _) in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let (best, second_worst, worst) = (simplex[0].1, simplex[dim - 1].1, simplex[dim].1);
        let reflected = point(&centroid, &simplex[dim].0, -1.0);
        let fr = t.eval(&reflected)?;
        iterations += 1;
        if fr < best {
            if t.remaining() == 0 {
                simplex[dim] = (reflected, fr);
                break;
            }
            let expanded = point(&centroid, &simplex[dim].0, -2.0);
            let fe = t.eval(&expanded)?;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[dim] = (reflected, fr);
            continue;
        }
        if t.remaining() == 0 {
            break;
        }
        let (contracted, fc, accept) = if fr < worst {
            let p = point(&centroid, &reflected, 0.5);
            let v = t.eval(&p)?;
            (p, v, v <= fr)
        } else {
            let p = point(&centroid, &simplex[dim].0, 0.5);
            let v = t.eval(&p)?;
            (p, v, v < worst)
        };
        if accept {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            if t.remaining() == 0 {
                break 'outer;
            }
            let p = point(&anchor, &entry.0, 0.5);
            let v = t.eval(&p)?;
            *entry = (p, v);
        }
    }
    Ok(t.finish(iterations))
}
