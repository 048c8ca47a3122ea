use super::{ArmijoConfig, Oracle};
use crate::error::Error;

pub(crate) struct Step {
    pub x: Vec<f64>,
    pub fx: f64,
}

pub(crate) enum StepFailure {
    Budget,
    NonFinite,
    NoDecrease,
}

/// Backtracks from `alpha0` until `f(x + a p) <= f(x) + c1 a g^T p`.
///
/// `slope` is `g^T p` and must be negative.
pub(crate) fn armijo(
    o: &impl Oracle,
    x: &[f64],
    fx: f64,
    p: &[f64],
    slope: f64,
    alpha0: f64,
    cfg: &ArmijoConfig,
) -> Result<Step, StepFailure> {
    debug_assert!(slope < 0.0);
    let mut alpha = alpha0;
    let mut trial = vec![0.0; x.len()];
    for _ in 0..=cfg.max_backtracks {
        for ((t, xi), pi) in trial.iter_mut().zip(x).zip(p) {
            *t = xi + alpha * pi;
        }
        let ft = match o.eval(&trial) {
            Ok(v) => v,
            Err(Error::BudgetExhausted) => return Err(StepFailure::Budget),
            Err(_) => return Err(StepFailure::NonFinite),
        };
        if !ft.is_finite() {
            return Err(StepFailure::NonFinite);
        }
        if ft <= fx + cfg.c1 * alpha * slope {
            return Ok(Step { x: trial, fx: ft });
        }
        alpha *= cfg.backtrack;
    }
    Err(StepFailure::NoDecrease)
}

/// First trial step from the previous decrease, capped at 1.
pub(crate) fn initial_step(fx: f64, f_prev: f64, slope: f64) -> f64 {
    let guess = 1.01 * 2.0 * (fx - f_prev) / slope;
    if guess.is_finite() && guess > 0.0 {
        guess.min(1.0)
    } else {
        1.0
    }
}
