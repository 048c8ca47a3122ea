//! Hybrid global minimizer: a non-negative tensor train over a discretized
//! box proposes starting points, a local method refines them, and the model
//! is pulled toward the best refined points by maximum likelihood.
//!
//! Building blocks:
//!
//! - [`tt`]: tensor-train storage, contractions, checkpoints.
//! - [`sampler`]: exact sequential sampling of multi-indices.
//! - [`grid`]: the search box and its index/point projections.
//! - [`learner`]: log-likelihood loss, analytic core gradients, updates.
//! - [`local`]: metered objectives and local refiners (BFGS, CG, PSO, SPSA).
//! - [`benchmarks`]: the 20-function test suite.
//! - [`driver`]: the outer loop and the random-restart baseline.
//! - [`harness`]: multi-seed experiments, aggregation, and reports.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod driver;
pub mod error;
pub mod grid;
pub mod harness;
pub mod learner;
pub mod local;
pub mod rng;
pub mod sampler;
pub mod tt;

pub use error::{Error, Result};
pub use grid::SearchSpace;
pub use learner::{Learner, LearnerConfig, OptimizerKind};
pub use sampler::{sample, SampleBatch};
pub use tt::TtDistribution;
