//! The outer loop: sample starts from the model, refine them locally, and
//! pull the model toward the best refined points. Also the uniform
//! random-restart baseline that uses the same batching and local method.
//!
//! Both loops minimize; to maximize `g`, minimize `-g`.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SearchSpace;
use crate::learner::{Learner, LearnerConfig};
use crate::local::{refine, LocalSearchConfig, LocalSearchResult, MeteredObjective};
use crate::rng::{derive_seed, stream_rng, TAG_BASELINE, TAG_LOCAL, TAG_MODEL_INIT, TAG_SAMPLER};
use crate::sampler::sample;
use crate::tt::TtDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TesalocsConfig {
    /// Total objective evaluations `M`, gradient probes included.
    pub budget: usize,
    /// Nodes per dimension `N`; must match the search space.
    pub grid_nodes: usize,
    pub rank: usize,
    /// Candidates per outer iteration `k`.
    pub batch: usize,
    /// Elites per outer iteration `k_top`.
    pub elite: usize,
    pub learner: LearnerConfig,
    pub local: LocalSearchConfig,
    pub seed: u64,
    /// Used to derive the per-candidate cap when `local` leaves it unset:
    /// `M / (k * expected_outer_iterations)`, but at least
    /// `cap_floor_per_dim * d`.
    pub expected_outer_iterations: usize,
    pub cap_floor_per_dim: usize,
}

impl Default for TesalocsConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            grid_nodes: 1024,
            rank: 5,
            batch: 100,
            elite: 10,
            learner: LearnerConfig::default(),
            local: LocalSearchConfig::default(),
            seed: 0,
            expected_outer_iterations: 10,
            cap_floor_per_dim: 10,
        }
    }
}

impl TesalocsConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.budget == 0 {
            return bad("budget must be positive");
        }
        if self.grid_nodes < 2 {
            return bad("grid needs at least 2 nodes per dimension");
        }
        if self.rank == 0 || self.batch == 0 || self.elite == 0 {
            return bad("rank, batch and elite must be positive");
        }
        if self.elite > self.batch {
            return bad("elite size cannot exceed batch size");
        }
        if self.expected_outer_iterations == 0 {
            return bad("expected_outer_iterations must be positive");
        }
        self.learner.validate()?;
        self.local.validate()
    }

    /// Per-candidate evaluation cap actually used at dimension `d`.
    pub fn per_candidate_cap(&self, d: usize) -> usize {
        self.local.max_evals_per_candidate.unwrap_or_else(|| {
            let share = self.budget / (self.batch * self.expected_outer_iterations);
            share.max(self.cap_floor_per_dim * d).max(1)
        })
    }

    fn resolved_local(&self, d: usize) -> LocalSearchConfig {
        let mut local = self.local;
        local.max_evals_per_candidate = Some(self.per_candidate_cap(d));
        local
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Cumulative evaluations after this iteration.
    pub evals: usize,
    pub best_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub per_candidate_cap: usize,
    /// Sampler draws that hit an all-zero conditional.
    pub sampler_fallbacks: usize,
    /// Why the loop stopped early, if it did.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<TraceRecord>,
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub diagnostics: Diagnostics,
}

impl RunTrace {
    /// Trace rows as CSV: `iteration,evals,best_value`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "iteration,evals,best_value")?;
        for r in &self.records {
            writeln!(w, "{},{},{:e}", r.iteration, r.evals, r.best_value)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Running best plus the trace, shared by both loops.
struct Tracker {
    trace: RunTrace,
}

impl Tracker {
    fn new(cap: usize) -> Self {
        Self {
            trace: RunTrace {
                records: Vec::new(),
                best_point: Vec::new(),
                best_value: f64::INFINITY,
                evaluations: 0,
                diagnostics: Diagnostics {
                    per_candidate_cap: cap,
                    ..Default::default()
                },
            },
        }
    }

    fn absorb(&mut self, res: &LocalSearchResult, evals: usize) {
        for (x, &v) in res.refined_points.iter().zip(&res.values) {
            if v < self.trace.best_value {
                self.trace.best_value = v;
                self.trace.best_point = x.clone();
            }
        }
        self.trace.evaluations = evals;
        self.trace.records.push(TraceRecord {
            iteration: self.trace.records.len(),
            evals,
            best_value: self.trace.best_value,
        });
    }

    fn finish(self) -> Result<RunTrace> {
        if self.trace.records.is_empty() {
            let why = self
                .trace
                .diagnostics
                .aborted
                .unwrap_or_else(|| "no iteration completed".into());
            return Err(Error::DegenerateModel(why));
        }
        Ok(self.trace)
    }
}

/// Indices of the `k_top` lowest values; ties keep batch order and NaN sorts
/// last.
pub fn select_elites(values: &[f64], k_top: usize) -> Vec<usize> {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v + 0.0 };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| key(values[a]).total_cmp(&key(values[b])));
    order.truncate(k_top);
    order
}

fn check_space(space: &SearchSpace, cfg: &TesalocsConfig) -> Result<()> {
    if space.nodes().iter().any(|&n| n != cfg.grid_nodes) {
        return Err(Error::InvalidArgument(format!(
            "search space nodes {:?} disagree with grid_nodes = {}",
            space.nodes().first(),
            cfg.grid_nodes
        )));
    }
    Ok(())
}

/// Runs the optimizer on `f` over `space` within `cfg.budget` evaluations.
pub fn run(
    f: &dyn Fn(&[f64]) -> f64,
    space: &SearchSpace,
    cfg: &TesalocsConfig,
) -> Result<RunTrace> {
    run_with_model(f, space, cfg, |_| {})
}

/// Like [`run`], calling `observe` with the model after every update.
pub fn run_with_model(
    f: &dyn Fn(&[f64]) -> f64,
    space: &SearchSpace,
    cfg: &TesalocsConfig,
    mut observe: impl FnMut(&TtDistribution),
) -> Result<RunTrace> {
    cfg.validate()?;
    check_space(space, cfg)?;
    let d = space.dim();
    let local = cfg.resolved_local(d);
    let local_seed = derive_seed(cfg.seed, TAG_LOCAL, 0);
    let objective = MeteredObjective::with_cap(f, cfg.budget);
    let mut model = TtDistribution::init_random_with_dims(
        space.nodes(),
        cfg.rank,
        derive_seed(cfg.seed, TAG_MODEL_INIT, 0),
    )?;
    let mut learner = Learner::new(cfg.learner)?;
    let mut tracker = Tracker::new(local.max_evals_per_candidate.unwrap_or(0));
    let mut launched = 0u64;

    for iteration in 0.. {
        if objective.evaluations_used() >= cfg.budget {
            break;
        }
        let batch = match sample(
            &model,
            cfg.batch,
            derive_seed(cfg.seed, TAG_SAMPLER, iteration),
        ) {
            Ok(b) => b,
            Err(e) => {
                tracker.trace.diagnostics.aborted = Some(e.to_string());
                break;
            }
        };
        tracker.trace.diagnostics.sampler_fallbacks += batch.fallback_modes;
        let starts = batch
            .indices
            .iter()
            .map(|n| space.to_point(n))
            .collect::<Result<Vec<_>>>()?;
        let res = refine(&objective, &starts, space, &local, local_seed, launched)?;
        launched += starts.len() as u64;
        tracker.absorb(&res, objective.evaluations_used());
        if res.budget_exhausted
            || res.evals_spent == 0
            || objective.evaluations_used() >= cfg.budget
        {
            break;
        }
        let elites = select_elites(&res.values, cfg.elite)
            .into_iter()
            .map(|l| space.to_index(&res.refined_points[l]))
            .collect::<Result<Vec<_>>>()?;
        if let Err(e) = learner.update(&mut model, &elites) {
            tracker.trace.diagnostics.aborted = Some(e.to_string());
            break;
        }
        observe(&model);
    }
    tracker.finish()
}

/// Random-restart baseline: batches of `cfg.batch` uniform starts in the box,
/// refined with the same local method and per-candidate cap as [`run`], until
/// the budget is spent. Model and learner settings are ignored.
///
/// Candidate `j` uses local-search stream `j` in both loops, so per-seed
/// comparisons are paired.
pub fn run_baseline(
    f: &dyn Fn(&[f64]) -> f64,
    space: &SearchSpace,
    cfg: &TesalocsConfig,
) -> Result<RunTrace> {
    cfg.validate()?;
    let d = space.dim();
    let local = cfg.resolved_local(d);
    let local_seed = derive_seed(cfg.seed, TAG_LOCAL, 0);
    let objective = MeteredObjective::with_cap(f, cfg.budget);
    let mut rng = stream_rng(derive_seed(cfg.seed, TAG_BASELINE, 0), 0);
    let mut tracker = Tracker::new(local.max_evals_per_candidate.unwrap_or(0));
    let mut launched = 0u64;

    while objective.evaluations_used() < cfg.budget {
        let starts: Vec<Vec<f64>> = (0..cfg.batch)
            .map(|_| {
                (0..d)
                    .map(|i| space.lower()[i] + rng.gen::<f64>() * space.width(i))
                    .collect()
            })
            .collect();
        let res = refine(&objective, &starts, space, &local, local_seed, launched)?;
        launched += starts.len() as u64;
        tracker.absorb(&res, objective.evaluations_used());
        if res.budget_exhausted || res.evals_spent == 0 {
            break;
        }
    }
    tracker.finish()
}
