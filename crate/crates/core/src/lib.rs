//! Optimistic Follow-the-Pruned-Leader (OptFPRL) for online convex
//! optimization over compact sets.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: feasible sets (Euclidean ball, axis-aligned box) with
//!   projection, membership and the closed-form constrained minimizers.
//! - [`oracles`]: first-order oracles for costs and predictions.
//! - [`regularizers`]: the four schedules for the strong-convexity increments.
//! - [`learner`]: the pruned optimistic FTRL learner itself.
//! - [`baselines`]: adaptive FTRL / OGD and their optimistic variants.
//! - [`metrics`]: dynamic regret, path length, prediction-error energy and
//!   the regret-bound evaluators.
//! - [`harness`]: scenario generators, the experiment runner, a brute-force
//!   grid oracle, CSV/SVG export and the property suite behind `verify`.

pub mod baselines;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod learner;
mod linalg;
pub mod metrics;
pub mod oracles;
pub mod regularizers;

pub use baselines::{BaselineKind, BaselineState, BaselineTuning};
pub use error::{Error, Result};
pub use geometry::FeasibleSet;
pub use learner::{Learner, LearnerState, PruneRule, SolverConfig, StepOutcome};
pub use metrics::{MetricsReport, SlotRecord, Trace};
pub use oracles::{ConvexFunction, CostSpec, Oracle, PredictionSpec};
pub use regularizers::{StrategyConfig, StrategyKind};
