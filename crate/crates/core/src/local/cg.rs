//! Polak–Ribière (PR+) nonlinear conjugate gradient with Armijo backtracking.
//! The direction is reset to steepest descent whenever it stops being a
//! descent direction.

use super::line_search::{armijo, initial_step, StepFailure};
use super::{
    gradient, norm2, norm_inf, small_change, LocalSearchConfig, Oracle, Outcome, RunStatus,
};
use crate::tt::dot;

pub(crate) fn minimize(o: &impl Oracle, x0: Vec<f64>, f0: f64, cfg: &LocalSearchConfig) -> Outcome {
    let mut x = x0;
    let mut fx = f0;
    let mut g = match gradient(o, &x, cfg.fd_step) {
        Ok(g) => g,
        Err(_) => return Outcome::new(x, fx, RunStatus::Budget),
    };
    if g.iter().any(|v| !v.is_finite()) {
        return Outcome::new(x, fx, RunStatus::NonFinite);
    }
    let mut dir: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut f_prev = fx + norm2(&g) / 2.0;

    for _ in 0..cfg.max_iterations {
        if norm_inf(&g) < cfg.grad_tol {
            return Outcome::new(x, fx, RunStatus::Converged);
        }
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = initial_step(fx, f_prev, slope);
        let step = match armijo(o, &x, fx, &dir, slope, alpha0, &cfg.line_search) {
            Ok(s) => s,
            Err(StepFailure::Budget) => return Outcome::new(x, fx, RunStatus::Budget),
            Err(StepFailure::NonFinite) => return Outcome::new(x, fx, RunStatus::NonFinite),
            Err(StepFailure::NoDecrease) => {
                return Outcome::new(x, fx, RunStatus::LineSearchFailed)
            }
        };
        let converged = small_change(fx, step.fx, cfg.rel_tol);
        let g_new = match gradient(o, &step.x, cfg.fd_step) {
            Ok(g) => g,
            Err(_) => return Outcome::new(step.x, step.fx, RunStatus::Budget),
        };
        if g_new.iter().any(|v| !v.is_finite()) {
            return Outcome::new(step.x, step.fx, RunStatus::NonFinite);
        }
        let gg = dot(&g, &g);
        let beta = if gg > 0.0 {
            let num: f64 = g_new.iter().zip(&g).map(|(a, b)| a * (a - b)).sum();
            (num / gg).max(0.0)
        } else {
            0.0
        };
        for (di, gi) in dir.iter_mut().zip(&g_new) {
            *di = -gi + beta * *di;
        }
        f_prev = fx;
        x = step.x;
        fx = step.fx;
        g = g_new;
        if converged {
            return Outcome::new(x, fx, RunStatus::Converged);
        }
    }
    Outcome::new(x, fx, RunStatus::IterationLimit)
}
