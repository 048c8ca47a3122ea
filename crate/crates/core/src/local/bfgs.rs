//! Dense inverse-Hessian BFGS with Armijo backtracking.

use super::line_search::{armijo, initial_step, StepFailure};
use super::{
    gradient, norm2, norm_inf, small_change, LocalSearchConfig, Oracle, Outcome, RunStatus,
};
use crate::tt::dot;

pub(crate) fn minimize(o: &impl Oracle, x0: Vec<f64>, f0: f64, cfg: &LocalSearchConfig) -> Outcome {
    let d = x0.len();
    let mut x = x0;
    let mut fx = f0;
    let mut g = match gradient(o, &x, cfg.fd_step) {
        Ok(g) => g,
        Err(_) => return Outcome::new(x, fx, RunStatus::Budget),
    };
    if g.iter().any(|v| !v.is_finite()) {
        return Outcome::new(x, fx, RunStatus::NonFinite);
    }
    // Row-major inverse Hessian approximation.
    let mut h = identity(d);
    let mut f_prev = fx + norm2(&g) / 2.0;
    let mut scaled = false;

    for _ in 0..cfg.max_iterations {
        if norm_inf(&g) < cfg.grad_tol {
            return Outcome::new(x, fx, RunStatus::Converged);
        }
        let mut p = mat_vec(&h, &g);
        p.iter_mut().for_each(|v| *v = -*v);
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            h = identity(d);
            scaled = false;
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = if scaled {
            1.0
        } else {
            initial_step(fx, f_prev, slope)
        };
        let step = match armijo(o, &x, fx, &p, slope, alpha0, &cfg.line_search) {
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
        let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm2(&s) * norm2(&y) && sy > 0.0 {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                h = identity(d);
                h.iter_mut().for_each(|v| *v *= gamma);
                scaled = true;
            }
            update_inverse(&mut h, &s, &y, sy);
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

fn identity(d: usize) -> Vec<f64> {
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        h[i * d + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|i| dot(&h[i * d..(i + 1) * d], v)).collect()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`, expanded for a
/// symmetric `H`.
fn update_inverse(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let d = s.len();
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let coef = rho * rho * yhy + rho;
    for i in 0..d {
        for j in 0..d {
            h[i * d + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::MeteredObjective;

    #[test]
    fn inverse_update_satisfies_secant() {
        let mut h = identity(3);
        let s = [0.3, -1.0, 2.0];
        let y = [1.0, 0.5, 1.5];
        let sy = dot(&s, &y);
        update_inverse(&mut h, &s, &y, sy);
        let hy = mat_vec(&h, &y);
        for (a, b) in hy.iter().zip(&s) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_converges() {
        let f = MeteredObjective::new(|x: &[f64]| x.iter().map(|v| v * v).sum());
        let x0 = vec![3.0, -4.0, 1.0, 0.5, -2.0];
        let f0 = f.eval(&x0).unwrap();
        let out = minimize(&f.scoped(None), x0, f0, &LocalSearchConfig::default());
        assert!(out.fx < 1e-12, "{}", out.fx);
    }
}
