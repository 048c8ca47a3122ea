//! Maximum-likelihood updates of the tensor-train model on elite indices.
//!
//! The loss is `L = -sum_{n in elites} log p(n)` with `p(n) = T[n] / Z`.
//! For a single elite `n` and core `i`,
//!
//! ```text
//! d log T[n] / d G_i[a, m, b] = [m = n_i] L_{i-1}[a] R_i[b] / (L_{i-1}^T G_i[:, n_i, :] R_i)
//! d log Z    / d G_i[a, m, b] = A_{i-1}[a] B_i[b]       / (A_{i-1}^T (sum_m G_i) B_i)
//! ```
//!
//! where `L`, `R` are the left/right partial chains at `n` and `A`, `B` the
//! mode-summed prefix/suffix interfaces. Both ratios are invariant to the
//! scale of the interface vectors, so all four are kept max-normalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tt::{dot, renormalize, TtDistribution};

/// Guard inside `log` for zero probabilities.
pub const LOG_PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    PlainSgd,
    AdaptiveMoment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub learning_rate: f64,
    pub steps_per_iteration: usize,
    /// Minimum core entry after each step.
    pub clamp_floor: f64,
    pub optimizer: OptimizerKind,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            steps_per_iteration: 1,
            clamp_floor: 1e-12,
            optimizer: OptimizerKind::AdaptiveMoment,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        if !(self.clamp_floor > 0.0 && self.clamp_floor < 1e-3) {
            return Err(Error::InvalidArgument(format!(
                "clamp floor must lie in (0, 1e-3), got {}",
                self.clamp_floor
            )));
        }
        if self.steps_per_iteration == 0 {
            return Err(Error::InvalidArgument(
                "steps_per_iteration must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `log p(idx)`, with the probability floored at [`LOG_PROB_FLOOR`].
pub fn log_prob(t: &TtDistribution, idx: &[usize]) -> Result<f64> {
    let log_z = t.log_mass()?;
    Ok((t.log_eval(idx)? - log_z).max(LOG_PROB_FLOOR.ln()))
}

/// `-sum log p(n)` over `elites`; duplicates count once per occurrence.
pub fn neg_log_likelihood(t: &TtDistribution, elites: &[Vec<usize>]) -> Result<f64> {
    if elites.is_empty() {
        return Err(Error::EmptyElites);
    }
    let log_z = t.log_mass()?;
    let floor = LOG_PROB_FLOOR.ln();
    let mut total = 0.0;
    for idx in elites {
        total -= (t.log_eval(idx)? - log_z).max(floor);
    }
    Ok(total)
}

/// Gradient of [`neg_log_likelihood`] with respect to every core entry, in
/// the cores' own row-major layout.
pub fn grad_cores(t: &TtDistribution, elites: &[Vec<usize>]) -> Result<Vec<Vec<f64>>> {
    if elites.is_empty() {
        return Err(Error::EmptyElites);
    }
    for idx in elites {
        t.check_index(idx)?;
    }
    let cores = t.cores();
    let d = cores.len();
    let mut grads: Vec<Vec<f64>> = cores.iter().map(|c| vec![0.0; c.data().len()]).collect();

    // Normalizer term, identical for every elite.
    let prefix = t.normalized_prefixes()?;
    let suffix = t.normalized_suffixes()?;
    let weight = elites.len() as f64;
    for (i, core) in cores.iter().enumerate() {
        let (left, modes, right) = core.shape();
        let a = &prefix[i];
        let b = &suffix[i + 1];
        let denom = dot(&crate::tt::vec_mat(a, &core.mode_sum(), right), b);
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::ModelCorruption(format!(
                "normalizer contraction at core {i} is {denom}"
            )));
        }
        let scale = weight / denom;
        let outer: Vec<f64> = (0..left * right)
            .map(|j| scale * a[j / right] * b[j % right])
            .collect();
        for (al, rows) in grads[i].chunks_exact_mut(modes * right).enumerate() {
            let o = &outer[al * right..(al + 1) * right];
            for row in rows.chunks_exact_mut(right) {
                for (x, y) in row.iter_mut().zip(o) {
                    *x += y;
                }
            }
        }
    }

    // Per-elite likelihood term.
    let mut lefts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut rights: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    for idx in elites {
        lefts.clear();
        lefts.push(vec![1.0]);
        for (i, core) in cores.iter().enumerate() {
            let mut v = core.left_mul(&lefts[i], idx[i]);
            if renormalize(&mut v).is_none() {
                return Err(Error::ModelCorruption(format!(
                    "elite {idx:?} has zero probability at core {i}"
                )));
            }
            lefts.push(v);
        }
        rights[d] = vec![1.0];
        for i in (0..d).rev() {
            let mut w = cores[i].right_mul(idx[i], &rights[i + 1]);
            if renormalize(&mut w).is_none() {
                return Err(Error::ModelCorruption(format!(
                    "elite {idx:?} has zero probability at core {i}"
                )));
            }
            rights[i] = w;
        }
        for (i, core) in cores.iter().enumerate() {
            let (left, modes, right) = core.shape();
            let l = &lefts[i];
            let r = &rights[i + 1];
            let denom = dot(&core.left_mul(l, idx[i]), r);
            if !(denom > 0.0) || !denom.is_finite() {
                return Err(Error::ModelCorruption(format!(
                    "likelihood contraction at core {i} is {denom}"
                )));
            }
            let g = &mut grads[i];
            let m = idx[i];
            for al in 0..left {
                let base = (al * modes + m) * right;
                for be in 0..right {
                    g[base + be] -= l[al] * r[be] / denom;
                }
            }
        }
    }
    Ok(grads)
}

#[derive(Debug, Clone)]
struct MomentState {
    step: i32,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// Stateful optimizer for the cores. Adaptive-moment state persists across
/// calls to [`Learner::update`], i.e. across outer iterations.
#[derive(Debug, Clone)]
pub struct Learner {
    cfg: LearnerConfig,
    moments: Option<MomentState>,
}

impl Learner {
    pub fn new(cfg: LearnerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, moments: None })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    /// Runs `steps_per_iteration` descent steps on the elite loss, clamping
    /// every entry to `clamp_floor` after each step.
    pub fn update(&mut self, t: &mut TtDistribution, elites: &[Vec<usize>]) -> Result<()> {
        if elites.is_empty() {
            return Err(Error::EmptyElites);
        }
        if self.cfg.learning_rate == 0.0 {
            return Ok(());
        }
        for _ in 0..self.cfg.steps_per_iteration {
            let grads = grad_cores(t, elites)?;
            if grads.iter().flatten().any(|g| !g.is_finite()) {
                return Err(Error::ModelCorruption("non-finite gradient".into()));
            }
            match self.cfg.optimizer {
                OptimizerKind::PlainSgd => self.sgd_step(t, &grads),
                OptimizerKind::AdaptiveMoment => self.adam_step(t, &grads),
            }
        }
        Ok(())
    }

    fn sgd_step(&self, t: &mut TtDistribution, grads: &[Vec<f64>]) {
        let lr = self.cfg.learning_rate;
        let floor = self.cfg.clamp_floor;
        for (core, g) in t.cores_mut().iter_mut().zip(grads) {
            for (x, gx) in core.data_mut().iter_mut().zip(g) {
                *x = (*x - lr * gx).max(floor);
            }
        }
    }

    fn adam_step(&mut self, t: &mut TtDistribution, grads: &[Vec<f64>]) {
        let state = self.moments.get_or_insert_with(|| MomentState {
            step: 0,
            first: grads.iter().map(|g| vec![0.0; g.len()]).collect(),
            second: grads.iter().map(|g| vec![0.0; g.len()]).collect(),
        });
        state.step += 1;
        let c1 = 1.0 - BETA1.powi(state.step);
        let c2 = 1.0 - BETA2.powi(state.step);
        let lr = self.cfg.learning_rate;
        let floor = self.cfg.clamp_floor;
        let (lr1, inv_c2) = (lr / c1, 1.0 / c2);
        for (i, core) in t.cores_mut().iter_mut().enumerate() {
            let entries = core
                .data_mut()
                .iter_mut()
                .zip(&grads[i])
                .zip(state.first[i].iter_mut().zip(state.second[i].iter_mut()));
            for ((x, &g), (m1, m2)) in entries {
                *m1 = BETA1 * *m1 + (1.0 - BETA1) * g;
                *m2 = BETA2 * *m2 + (1.0 - BETA2) * g * g;
                let step = lr1 * *m1 / ((*m2 * inv_c2).sqrt() + EPSILON);
                *x = (*x - step).max(floor);
            }
        }
    }
}

/// One-shot update with a fresh optimizer state.
pub fn update(
    t: &TtDistribution,
    elites: &[Vec<usize>],
    cfg: &LearnerConfig,
) -> Result<TtDistribution> {
    let mut out = t.clone();
    Learner::new(*cfg)?.update(&mut out, elites)?;
    Ok(out)
}
