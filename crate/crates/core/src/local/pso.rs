//! Particle swarm localized around a start point.
//!
//! The swarm is seeded in a box of half-width `init_radius * (b - a)` around
//! the start (intersected with the search box), with the start itself as
//! particle 0. Positions are clamped to the search box after every move, and a
//! clamped velocity component is zeroed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Oracle, Outcome, PsoConfig, RunStatus};
use crate::grid::SearchSpace;

pub(crate) fn minimize(
    o: &impl Oracle,
    start: Vec<f64>,
    f0: f64,
    space: &SearchSpace,
    cfg: &PsoConfig,
    rng: &mut ChaCha8Rng,
) -> Outcome {
    let d = start.len();
    let radius: Vec<f64> = (0..d).map(|i| cfg.init_radius * space.width(i)).collect();
    let vmax: Vec<f64> = radius.clone();

    let mut best_x = start.clone();
    let mut best_f = f0;

    let mut pos = vec![start.clone()];
    let mut val = vec![f0];
    for _ in 1..cfg.swarm_size {
        let p: Vec<f64> = (0..d)
            .map(|i| {
                let lo = (start[i] - radius[i]).max(space.lower()[i]);
                let hi = (start[i] + radius[i]).min(space.upper()[i]);
                lo + rng.gen::<f64>() * (hi - lo)
            })
            .collect();
        let fp = match o.eval(&p) {
            Ok(v) => v,
            Err(_) => return Outcome::new(best_x, best_f, RunStatus::Budget),
        };
        if !fp.is_finite() {
            return Outcome::new(best_x, best_f, RunStatus::NonFinite);
        }
        if fp < best_f {
            best_f = fp;
            best_x = p.clone();
        }
        pos.push(p);
        val.push(fp);
    }
    let mut vel: Vec<Vec<f64>> = (0..pos.len())
        .map(|_| {
            (0..d)
                .map(|i| (2.0 * rng.gen::<f64>() - 1.0) * 0.5 * radius[i])
                .collect()
        })
        .collect();
    let mut pbest = pos.clone();
    let mut pbest_f = val;

    for _ in 0..cfg.max_iterations {
        let mut moving = false;
        for k in 0..pos.len() {
            for i in 0..d {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let v = cfg.inertia * vel[k][i]
                    + cfg.cognitive * r1 * (pbest[k][i] - pos[k][i])
                    + cfg.social * r2 * (best_x[i] - pos[k][i]);
                vel[k][i] = v.clamp(-vmax[i], vmax[i]);
                let moved = pos[k][i] + vel[k][i];
                pos[k][i] = moved.clamp(space.lower()[i], space.upper()[i]);
                if pos[k][i] != moved {
                    // Absorbing wall: otherwise the particle keeps pressing
                    // against the bound and the swarm stalls there.
                    vel[k][i] = 0.0;
                }
                if vel[k][i].abs() > 1e-15 * space.width(i) {
                    moving = true;
                }
            }
            let fp = match o.eval(&pos[k]) {
                Ok(v) => v,
                Err(_) => return Outcome::new(best_x, best_f, RunStatus::Budget),
            };
            if !fp.is_finite() {
                return Outcome::new(best_x, best_f, RunStatus::NonFinite);
            }
            if fp < pbest_f[k] {
                pbest_f[k] = fp;
                pbest[k] = pos[k].clone();
                if fp < best_f {
                    best_f = fp;
                    best_x = pos[k].clone();
                }
            }
        }
        if !moving {
            return Outcome::new(best_x, best_f, RunStatus::Converged);
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
    fn improves_and_stays_in_box() {
        let space = SearchSpace::uniform(4, -2.0, 2.0, 3).unwrap();
        let inside = std::cell::Cell::new(true);
        let f = MeteredObjective::with_cap(
            |x: &[f64]| {
                if x.iter().any(|v| v.abs() > 2.0) {
                    inside.set(false);
                }
                x.iter().map(|v| (v - 1.9) * (v - 1.9)).sum()
            },
            2000,
        );
        let x0 = vec![1.0; 4];
        let f0 = f.eval(&x0).unwrap();
        let out = minimize(
            &f.scoped(None),
            x0,
            f0,
            &space,
            &PsoConfig::default(),
            &mut stream_rng(1, 0),
        );
        assert!(inside.get());
        assert!(out.fx < 1e-3 * f0, "{} vs {f0}", out.fx);
        assert_eq!(out.status, RunStatus::Budget);
    }
}
