//! Simultaneous-perturbation stochastic approximation in box-normalized
//! coordinates `u = (x - a) / (b - a)`.
//!
//! The step gain is calibrated on the first iteration so that the initial
//! move has length about `a` in `u` units, whatever the objective's scale.
//! The refined point is the best point evaluated during the run, so no extra
//! evaluation is spent on the iterate itself.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Oracle, Outcome, RunStatus, SpsaConfig};
use crate::grid::SearchSpace;

pub(crate) fn minimize(
    o: &impl Oracle,
    start: Vec<f64>,
    f0: f64,
    space: &SearchSpace,
    cfg: &SpsaConfig,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let d = start.len();
    let lower = space.lower();
    let width: Vec<f64> = (0..d).map(|i| space.width(i)).collect();
    let mut u: Vec<f64> = (0..d).map(|i| (start[i] - lower[i]) / width[i]).collect();

    let mut best_x = start;
    let mut best_f = f0;
    let mut gain_scale: Option<f64> = None;
    let to_x = |u: &[f64]| -> Vec<f64> { (0..d).map(|i| lower[i] + u[i] * width[i]).collect() };

    for k in 0..cfg.max_iterations {
        let kf = k as f64;
        let ck = cfg.c / (kf + 1.0).powf(cfg.gamma);
        let ak = cfg.a / (kf + 1.0 + cfg.stability).powf(cfg.alpha);
        let delta: Vec<f64> = (0..d)
            .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let up: Vec<f64> = (0..d)
            .map(|i| (u[i] + ck * delta[i]).clamp(0.0, 1.0))
            .collect();
        let down: Vec<f64> = (0..d)
            .map(|i| (u[i] - ck * delta[i]).clamp(0.0, 1.0))
            .collect();
        let (xp, xm) = (to_x(&up), to_x(&down));
        let fp = match o.eval(&xp) {
            Ok(v) => v,
            Err(_) => return Outcome::new(best_x, best_f, RunStatus::Budget),
        };
        if !fp.is_finite() {
            return Outcome::new(best_x, best_f, RunStatus::NonFinite);
        }
        if fp < best_f {
            best_f = fp;
            best_x = xp;
        }
        let fm = match o.eval(&xm) {
            Ok(v) => v,
            Err(_) => return Outcome::new(best_x, best_f, RunStatus::Budget),
        };
        if !fm.is_finite() {
            return Outcome::new(best_x, best_f, RunStatus::NonFinite);
        }
        if fm < best_f {
            best_f = fm;
            best_x = xm;
        }
        let diff = fp - fm;
        let scale = *gain_scale.get_or_insert_with(|| {
            let g0 = diff.abs() / (2.0 * ck);
            let a0 = cfg.a / (1.0 + cfg.stability).powf(cfg.alpha);
            if g0 > 0.0 {
                cfg.a / (a0 * g0)
            } else {
                1.0
            }
        });
        for i in 0..d {
            let span = up[i] - down[i];
            if span > 0.0 {
                let g = diff / span;
                u[i] = (u[i] - scale * ak * g).clamp(0.0, 1.0);
            }
        }
    }
    Outcome::new(best_x, best_f, RunStatus::IterationLimit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::MeteredObjective;
    use crate::rng::stream_rng;

    #[test]
    fn descends_on_badly_scaled_quadratic() {
        let space = SearchSpace::uniform(5, -100.0, 100.0, 3).unwrap();
        let f = MeteredObjective::with_cap(
            |x: &[f64]| 1e6 * x.iter().map(|v| (v - 10.0) * (v - 10.0)).sum::<f64>(),
            600,
        );
        let x0 = vec![-60.0; 5];
        let f0 = f.eval(&x0).unwrap();
        let out = minimize(
            &f.scoped(None),
            x0,
            f0,
            &space,
            &SpsaConfig::default(),
            &mut stream_rng(3, 0),
        );
        assert!(out.fx < 0.05 * f0, "{} vs {f0}", out.fx);
        assert!(space.contains(&out.x));
    }
}
