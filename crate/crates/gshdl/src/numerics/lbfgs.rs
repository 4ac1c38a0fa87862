//! Limited-memory BFGS with Armijo backtracking line search.
//!
//! Two-loop recursion over a bounded history of (step, gradient-change)
//! pairs; the line search halves the step until the sufficient-decrease
//! condition f(x + a d) <= f(x) + c1 a g·d holds.

use crate::error::{Error, Result};
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct OptimizerOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub history_size: usize,
    pub line_search_max_steps: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: 1e-6,
            history_size: 10,
            line_search_max_steps: 40,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0
            || self.history_size == 0
            || self.line_search_max_steps == 0
            || self.gradient_tolerance <= 0.0
        {
            return Err(Error::Config("optimizer options must be positive".into()));
        }
        Ok(())
    }
}

/// Minimization outcome: final iterate plus the objective value after each
/// accepted iteration (monotone non-increasing by construction).
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub argmin: Vec<f64>,
    pub trace: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

const ARMIJO_C1: f64 = 1e-4;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize `objective` (returning value and gradient) from `start`.
///
/// A non-finite objective or gradient encountered during the search raises
/// a numerical error carrying the last good iterate in its message-free
/// payload; callers needing the iterate can rely on the trace staying
/// attached to prior successful calls.
pub fn lbfgs_minimize<F>(
    mut objective: F,
    start: &[f64],
    opts: &OptimizerOptions,
) -> Result<MinimizeResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    opts.validate()?;
    let n = start.len();
    let mut x = start.to_vec();
    let (mut fx, mut grad) = objective(&x);
    if !fx.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("objective not finite at start".into()));
    }

    let mut trace = vec![fx];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new(); // (s, y, rho)
    let mut gamma = 1.0; // H0 = gamma * I
    let mut iterations = 0;

    for _ in 0..opts.max_iterations {
        if inf_norm(&grad) <= opts.gradient_tolerance {
            break;
        }
        iterations += 1;

        // Two-loop recursion: d = -H g.
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let alpha = rho * dot(s, &q);
            for i in 0..n {
                q[i] -= alpha * y[i];
            }
            alphas.push(alpha);
        }
        // Initial Hessian scaling from the most recent pair.
        if !history.is_empty() {
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
        for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            for i in 0..n {
                q[i] += (alpha - beta) * s[i];
            }
        }
        let mut direction: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut g_dot_d = dot(&grad, &direction);
        if g_dot_d >= 0.0 {
            // Not a descent direction; fall back to steepest descent.
            direction = grad.iter().map(|g| -g).collect();
            g_dot_d = dot(&grad, &direction);
            history.clear();
        }

        // Armijo backtracking with halving.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..opts.line_search_max_steps {
            let cand: Vec<f64> = x.iter().zip(&direction).map(|(xi, di)| xi + step * di).collect();
            let (fc, gc) = objective(&cand);
            if !fc.is_finite() || gc.iter().any(|g| !g.is_finite()) {
                step *= 0.5;
                continue;
            }
            if fc <= fx + ARMIJO_C1 * step * g_dot_d {
                accepted = Some((cand, fc, gc));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            // No acceptable step; gradient may be at numerical noise level.
            break;
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let mut y: Vec<f64> = g_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let ss = dot(&s, &s);
        if ss > 0.0 {
            // Powell damping: Armijo alone does not enforce curvature, so
            // blend y toward B0 s until s·y stays safely positive.
            let sy = dot(&s, &y);
            let sbs = ss / gamma;
            if sy < 0.2 * sbs {
                let theta = 0.8 * sbs / (sbs - sy);
                for (yi, si) in y.iter_mut().zip(&s) {
                    *yi = theta * *yi + (1.0 - theta) * si / gamma;
                }
            }
            let sy = dot(&s, &y);
            if sy > 0.0 && sy.is_finite() {
                let yy = dot(&y, &y);
                if yy > 0.0 {
                    gamma = sy / yy;
                }
                if history.len() == opts.history_size {
                    history.pop_front();
                }
                history.push_back((s, y, 1.0 / sy));
            }
        }

        x = x_new;
        fx = f_new;
        grad = g_new;
        trace.push(fx);
    }

    let gradient_norm = inf_norm(&grad);
    Ok(MinimizeResult { argmin: x, trace, gradient_norm, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_bowl_converges_to_center() {
        let a = [1.5, -2.0, 0.25];
        let obj = |x: &[f64]| {
            let f: f64 = x.iter().zip(&a).map(|(xi, ai)| (xi - ai) * (xi - ai)).sum();
            let g: Vec<f64> = x.iter().zip(&a).map(|(xi, ai)| 2.0 * (xi - ai)).collect();
            (f, g)
        };
        let r = lbfgs_minimize(obj, &[10.0, 10.0, 10.0], &OptimizerOptions {
            gradient_tolerance: 1e-10,
            ..Default::default()
        })
        .unwrap();
        for (xi, ai) in r.argmin.iter().zip(&a) {
            assert!((xi - ai).abs() < 1e-8);
        }
    }

    #[test]
    fn rosenbrock_reaches_global_minimum() {
        let obj = |x: &[f64]| {
            let (a, b) = (1.0, 100.0);
            let f = (a - x[0]).powi(2) + b * (x[1] - x[0] * x[0]).powi(2);
            let g = vec![
                -2.0 * (a - x[0]) - 4.0 * b * (x[1] - x[0] * x[0]) * x[0],
                2.0 * b * (x[1] - x[0] * x[0]),
            ];
            (f, g)
        };
        let r = lbfgs_minimize(obj, &[-1.2, 1.0], &OptimizerOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-9,
            ..Default::default()
        })
        .unwrap();
        assert!((r.argmin[0] - 1.0).abs() < 1e-6, "x0 = {}", r.argmin[0]);
        assert!((r.argmin[1] - 1.0).abs() < 1e-6, "x1 = {}", r.argmin[1]);
        assert!(*r.trace.last().unwrap() < 1e-6);
    }

    #[test]
    fn trace_is_monotone_non_increasing() {
        let obj = |x: &[f64]| {
            let f = x[0].powi(4) + x[1].powi(2) + (x[0] * x[1] - 1.0).powi(2);
            let g = vec![
                4.0 * x[0].powi(3) + 2.0 * (x[0] * x[1] - 1.0) * x[1],
                2.0 * x[1] + 2.0 * (x[0] * x[1] - 1.0) * x[0],
            ];
            (f, g)
        };
        let r = lbfgs_minimize(obj, &[3.0, -4.0], &OptimizerOptions::default()).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "trace increased: {} -> {}", w[0], w[1]);
        }
    }

    /// Logistic loss on separable points: LBFGS must do at least as well as
    /// a long fixed-step gradient-descent run.
    #[test]
    fn logistic_regression_beats_gradient_descent_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut points = Vec::new();
        for i in 0..20 {
            let label = if i % 2 == 0 { 1.0 } else { -1.0 };
            let x = label * 1.5 + rng.gen_range(-0.4..0.4);
            let y = label * 0.8 + rng.gen_range(-0.4..0.4);
            points.push(([x, y, 1.0], label));
        }
        let loss = |w: &[f64]| -> (f64, Vec<f64>) {
            let mut f = 0.0;
            let mut g = vec![0.0; 3];
            for (x, label) in &points {
                let z: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum();
                let m = -label * z;
                // log(1 + e^m), numerically stable.
                f += if m > 30.0 { m } else { (1.0 + m.exp()).ln() };
                let sig = 1.0 / (1.0 + (-m).exp());
                for k in 0..3 {
                    g[k] += -label * x[k] * sig;
                }
            }
            (f, g)
        };

        // Oracle: 1000 fixed-step gradient-descent iterations.
        let mut w = vec![0.0; 3];
        let step = 0.05;
        for _ in 0..1000 {
            let (_, g) = loss(&w);
            for k in 0..3 {
                w[k] -= step * g[k];
            }
        }
        let (oracle_loss, _) = loss(&w);

        let r = lbfgs_minimize(loss, &[0.0, 0.0, 0.0], &OptimizerOptions {
            max_iterations: 200,
            gradient_tolerance: 1e-10,
            ..Default::default()
        })
        .unwrap();
        let final_loss = *r.trace.last().unwrap();
        assert!(
            final_loss <= oracle_loss + 1e-12,
            "lbfgs {final_loss} vs gd oracle {oracle_loss}"
        );
    }

    #[test]
    fn rejects_non_finite_start() {
        let obj = |_: &[f64]| (f64::NAN, vec![0.0]);
        assert!(lbfgs_minimize(obj, &[0.0], &OptimizerOptions::default()).is_err());
    }
}
