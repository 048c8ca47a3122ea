//! Local refinement of candidate points under a shared evaluation budget.
//!
//! Every refiner sees the objective only through a [`MeteredObjective`], so
//! gradient probes are paid for like any other query. Each start gets its own
//! run, optionally capped by `max_evals_per_candidate`; a run that hits a cap
//! returns the best point it has evaluated.

mod bfgs;
mod cg;
mod line_search;
mod metered;
mod pso;
mod spsa;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SearchSpace;
use crate::rng::stream_rng;

pub use metered::MeteredObjective;
pub(crate) use metered::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalMethod {
    Bfgs,
    Cg,
    Pso,
    Spsa,
    None,
}

impl LocalMethod {
    pub const ALL: [LocalMethod; 5] = [Self::Bfgs, Self::Cg, Self::Pso, Self::Spsa, Self::None];

    pub fn name(self) -> &'static str {
        match self {
            Self::Bfgs => "bfgs",
            Self::Cg => "cg",
            Self::Pso => "pso",
            Self::Spsa => "spsa",
            Self::None => "none",
        }
    }
}

impl fmt::Display for LocalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LocalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown local method `{s}`")))
    }
}

/// Sufficient-decrease backtracking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArmijoConfig {
    pub c1: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for ArmijoConfig {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            backtrack: 0.5,
            max_backtracks: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Half-width of the initial swarm box around the start, as a fraction
    /// of the search box width per axis.
    pub init_radius: f64,
    pub max_iterations: usize,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 20,
            inertia: 0.7298,
            cognitive: 1.49618,
            social: 1.49618,
            init_radius: 0.1,
            max_iterations: 10_000,
        }
    }
}

/// Gain sequences `a_k = a / (k + 1 + A)^alpha`, `c_k = c / (k + 1)^gamma`,
/// both in units of the box width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    pub stability: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub max_iterations: usize,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: 0.05,
            c: 0.01,
            stability: 10.0,
            alpha: 0.602,
            gamma: 0.101,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalSearchConfig {
    pub method: LocalMethod,
    /// Evaluation cap for a single run, start evaluation included. `None`
    /// leaves runs bounded only by convergence and the global budget.
    pub max_evals_per_candidate: Option<usize>,
    /// Relative central-difference step.
    pub fd_step: f64,
    pub grad_tol: f64,
    pub rel_tol: f64,
    pub max_iterations: usize,
    pub line_search: ArmijoConfig,
    pub pso: PsoConfig,
    pub spsa: SpsaConfig,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            method: LocalMethod::Bfgs,
            max_evals_per_candidate: None,
            fd_step: 1e-6,
            grad_tol: 1e-8,
            rel_tol: 1e-12,
            max_iterations: 10_000,
            line_search: ArmijoConfig::default(),
            pso: PsoConfig::default(),
            spsa: SpsaConfig::default(),
        }
    }
}

impl LocalSearchConfig {
    pub fn with_method(method: LocalMethod) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("fd_step", self.fd_step),
            ("grad_tol", self.grad_tol),
            ("rel_tol", self.rel_tol),
            ("line_search.c1", self.line_search.c1),
            ("line_search.backtrack", self.line_search.backtrack),
            ("pso.inertia", self.pso.inertia),
            ("pso.cognitive", self.pso.cognitive),
            ("pso.social", self.pso.social),
            ("pso.init_radius", self.pso.init_radius),
            ("spsa.a", self.spsa.a),
            ("spsa.c", self.spsa.c),
            ("spsa.stability", self.spsa.stability),
            ("spsa.alpha", self.spsa.alpha),
            ("spsa.gamma", self.spsa.gamma),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.line_search.c1 < 1.0 && self.line_search.backtrack < 1.0) {
            return Err(Error::InvalidArgument(
                "Armijo c1 and backtrack factor must be below 1".into(),
            ));
        }
        if self.max_evals_per_candidate == Some(0)
            || self.max_iterations == 0
            || self.line_search.max_backtracks == 0
            || self.pso.swarm_size == 0
            || self.pso.max_iterations == 0
            || self.spsa.max_iterations == 0
        {
            return Err(Error::InvalidArgument(
                "integer parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Why a single refinement run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    /// Per-run or global evaluation cap reached.
    Budget,
    NonFinite,
    LineSearchFailed,
    IterationLimit,
    /// The identity refiner.
    Unrefined,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchResult {
    pub refined_points: Vec<Vec<f64>>,
    /// Recorded objective value at each refined point.
    pub values: Vec<f64>,
    /// Evaluations consumed by this call (`m_loc`).
    pub evals_spent: usize,
    pub statuses: Vec<RunStatus>,
    /// The global budget stopped the call before every start was fully
    /// refined.
    pub budget_exhausted: bool,
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub status: RunStatus,
}

impl Outcome {
    pub(crate) fn new(x: Vec<f64>, fx: f64, status: RunStatus) -> Self {
        Self { x, fx, status }
    }
}

/// Runs the configured method independently from each start.
///
/// Start `l` draws its random numbers from stream `first_stream + l` of
/// `seed`, which lets callers pair random streams across experiment arms.
pub fn refine(
    f: &MeteredObjective<'_>,
    starts: &[Vec<f64>],
    space: &SearchSpace,
    cfg: &LocalSearchConfig,
    seed: u64,
    first_stream: u64,
) -> Result<LocalSearchResult> {
    cfg.validate()?;
    if starts.is_empty() {
        return Err(Error::InvalidArgument(
            "refine needs at least one start".into(),
        ));
    }
    let before = f.evaluations_used();
    let mut result = LocalSearchResult {
        refined_points: Vec::with_capacity(starts.len()),
        values: Vec::with_capacity(starts.len()),
        evals_spent: 0,
        statuses: Vec::with_capacity(starts.len()),
        budget_exhausted: false,
    };

    for (l, start) in starts.iter().enumerate() {
        if start.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: start.len(),
            });
        }
        let mut x0 = start.clone();
        space.clamp(&mut x0);
        let oracle = f.scoped(cfg.max_evals_per_candidate);
        let f0 = match oracle.eval(&x0) {
            Ok(v) => v,
            Err(_) => {
                result.budget_exhausted = true;
                break;
            }
        };
        let outcome = if !f0.is_finite() {
            Outcome::new(x0, f0, RunStatus::NonFinite)
        } else {
            let mut rng = stream_rng(seed, first_stream + l as u64);
            match cfg.method {
                LocalMethod::None => Outcome::new(x0, f0, RunStatus::Unrefined),
                LocalMethod::Bfgs => bfgs::minimize(&oracle, x0, f0, cfg),
                LocalMethod::Cg => cg::minimize(&oracle, x0, f0, cfg),
                LocalMethod::Pso => pso::minimize(&oracle, x0, f0, space, &cfg.pso, &mut rng),
                LocalMethod::Spsa => spsa::minimize(&oracle, x0, f0, space, &cfg.spsa, &mut rng),
            }
        };
        // A run cut short by the global budget (rather than its own cap)
        // means later starts cannot be refined either.
        let globally_cut = outcome.status == RunStatus::Budget && oracle.global_binding();
        result.refined_points.push(outcome.x);
        result.values.push(outcome.fx);
        result.statuses.push(outcome.status);
        if globally_cut || f.is_exhausted() {
            result.budget_exhausted = globally_cut || l + 1 < starts.len();
            break;
        }
    }
    result.evals_spent = f.evaluations_used() - before;
    Ok(result)
}

/// Central-difference gradient with per-component step
/// `h_i = fd_step * max(1, |x_i|)`. Consumes exactly `2 d` evaluations, and
/// none at all if the budget cannot cover them.
pub fn numerical_gradient(f: &MeteredObjective<'_>, x: &[f64], fd_step: f64) -> Result<Vec<f64>> {
    gradient(f, x, fd_step)
}

pub(crate) fn gradient(o: &impl Oracle, x: &[f64], fd_step: f64) -> Result<Vec<f64>> {
    if o.remaining() < 2 * x.len() {
        return Err(Error::BudgetExhausted);
    }
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = fd_step * x[i].abs().max(1.0);
        let (up, down) = (x[i] + h, x[i] - h);
        probe[i] = up;
        let fp = o.eval(&probe)?;
        probe[i] = down;
        let fm = o.eval(&probe)?;
        probe[i] = x[i];
        g.push((fp - fm) / (up - down));
    }
    Ok(g)
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn small_change(old: f64, new: f64, rel_tol: f64) -> bool {
    (old - new).abs() <= rel_tol * old.abs().max(new.abs()).max(f64::MIN_POSITIVE)
}
