use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{BaselineKind, BaselineState, BaselineTuning};
use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::learner::{Learner, PruneRule};
use crate::linalg::{dist, dot};
use crate::metrics::{path_length, MetricsReport, SlotRecord, Trace};
use crate::oracles::Oracle;
use crate::regularizers::{StrategyConfig, StrategyKind, StrategyName};

use super::scenarios::{comparator_sequence, RandomSpec, Scenario, ScenarioId};

/// Slack applied to every runtime inequality check.
pub const INVARIANT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    OptFprl,
    Baseline(BaselineKind),
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::OptFprl => "optfprl",
            Algorithm::Baseline(k) => k.as_str(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "optfprl" {
            return Ok(Algorithm::OptFprl);
        }
        s.parse::<BaselineKind>()
            .map(Algorithm::Baseline)
            .map_err(|_| Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

/// Which learner to drive and how it is configured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerSpec {
    pub algo: Algorithm,
    /// OptFPRL only.
    pub strategy: StrategyName,
    /// Path budget for the known-path strategy; `None` uses the exact
    /// comparator path of the instance.
    pub path_budget: Option<f64>,
    pub cadence: usize,
    pub tuning: BaselineTuning,
}

impl LearnerSpec {
    pub fn optfprl(strategy: StrategyName) -> Self {
        Self {
            algo: Algorithm::OptFprl,
            strategy,
            path_budget: None,
            cadence: 1,
            tuning: BaselineTuning::default(),
        }
    }

    pub fn baseline(kind: BaselineKind) -> Self {
        Self {
            algo: Algorithm::Baseline(kind),
            ..Self::optfprl(StrategyName::Agnostic)
        }
    }

    pub fn strategy_config(&self, radius: f64, comparators: &[Vec<f64>]) -> Result<StrategyConfig> {
        let kind = match self.strategy {
            StrategyName::Agnostic => StrategyKind::Agnostic,
            StrategyName::KnownPath => StrategyKind::KnownPath {
                path_budget: self.path_budget.unwrap_or_else(|| path_length(comparators)),
            },
            StrategyName::ObservedPath => StrategyKind::ObservedPath,
            StrategyName::Recursive => StrategyKind::Recursive,
        };
        StrategyConfig::new(kind, radius)
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioId,
    pub horizon: usize,
    pub dim: usize,
    pub radius: f64,
    pub seed: u64,
    pub random: RandomSpec,
    pub learner: LearnerSpec,
    pub check_invariants: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioId::Fixed(1),
            horizon: super::scenarios::DEFAULT_HORIZON,
            dim: super::scenarios::DEFAULT_DIM,
            radius: super::scenarios::DEFAULT_RADIUS,
            seed: 0,
            random: RandomSpec::default(),
            learner: LearnerSpec::optfprl(StrategyName::Agnostic),
            check_invariants: true,
        }
    }
}

impl RunConfig {
    pub fn build_scenario(&self) -> Result<Scenario> {
        match self.scenario {
            ScenarioId::Fixed(id) => Scenario::fixed(id, self.horizon, self.dim, self.radius),
            ScenarioId::Random => Scenario::random(
                FeasibleSet::ball(self.dim, self.radius)?,
                self.horizon,
                self.seed,
                self.random,
            ),
        }
    }
}

fn violation(slot: usize, inequality: String) -> Error {
    Error::InvariantViolation { slot, inequality }
}

fn check_feasible(set: &FeasibleSet, x: &[f64], slot: usize) -> Result<()> {
    if !set.contains(x)? {
        return Err(violation(slot, format!("x_t outside the feasible set: {x:?}")));
    }
    Ok(())
}

/// Drives one learner over a materialized scenario. `comparators` must hold
/// one point per slot.
pub fn run_scenario(
    scenario: &Scenario,
    comparators: &[Vec<f64>],
    spec: &LearnerSpec,
    check_invariants: bool,
) -> Result<Trace> {
    if comparators.len() != scenario.horizon {
        return Err(Error::InvalidParameter(format!(
            "{} comparators for horizon {}",
            comparators.len(),
            scenario.horizon
        )));
    }
    let mut trace = match spec.algo {
        Algorithm::OptFprl => run_optfprl(scenario, comparators, spec, check_invariants)?,
        Algorithm::Baseline(kind) => {
            run_baseline(scenario, comparators, kind, spec.tuning, check_invariants)?
        }
    };
    trace.comparators = comparators.to_vec();
    trace.metadata = vec![
        ("scenario".into(), scenario.id.to_string()),
        ("seed".into(), scenario.seed.to_string()),
        ("horizon".into(), scenario.horizon.to_string()),
        ("dim".into(), scenario.dim().to_string()),
        ("radius".into(), scenario.set.radius().to_string()),
        ("algo".into(), spec.algo.to_string()),
    ];
    if let Some(s) = &trace.strategy {
        trace.metadata.push(("strategy".into(), s.kind.name().to_string()));
        if let StrategyKind::KnownPath { path_budget } = s.kind {
            trace.metadata.push(("path_budget".into(), path_budget.to_string()));
        }
        trace.metadata.push(("cadence".into(), spec.cadence.to_string()));
    }
    Ok(trace)
}

fn run_optfprl(
    scenario: &Scenario,
    comparators: &[Vec<f64>],
    spec: &LearnerSpec,
    check: bool,
) -> Result<Trace> {
    let set = scenario.set.clone();
    let radius = set.radius();
    let strategy = spec.strategy_config(radius, comparators)?;
    let prune = PruneRule::new(spec.cadence)?;
    let mut learner = Learner::new(
        set.clone(),
        Oracle::linear(scenario.prediction(1)?.to_vec()),
        strategy,
        prune,
    )?;
    let mut trace = Trace::new(Algorithm::OptFprl.as_str(), Some(strategy), radius);
    trace.records.reserve(scenario.horizon);
    let tol = INVARIANT_TOLERANCE;
    let mut energy = 0.0;
    let mut delta_cum = 0.0;
    let mut sigma_cum_prev = 0.0;
    for t in 1..=scenario.horizon {
        let c = scenario.cost(t)?;
        let u = &comparators[t - 1];
        let x_t = learner.iterate().to_vec();
        if check {
            check_feasible(&set, &x_t, t)?;
        }
        let out = learner.observe_and_step(
            &Oracle::linear(c.to_vec()),
            Oracle::linear(scenario.prediction(t + 1)?.to_vec()),
            Some(u),
        )?;
        energy += out.epsilon * out.epsilon;
        if check {
            if spec.cadence == 1 && out.state_norm > out.state_bound(radius) + tol {
                return Err(violation(
                    t,
                    format!(
                        "|p_1:t| = {} > R sigma_1:t-1 + eps_t = {}",
                        out.state_norm,
                        out.state_bound(radius)
                    ),
                ));
            }
            if out.sigma_t < 0.0 || out.sigma_cum < sigma_cum_prev {
                return Err(violation(t, format!("sigma_t = {} < 0", out.sigma_t)));
            }
            if let Some(d) = out.delta_t {
                let single = 2.0 * radius * out.epsilon;
                if d > single + tol {
                    return Err(violation(
                        t,
                        format!("delta_t = {d} > 2 R eps_t = {single}"),
                    ));
                }
                if delta_cum > 0.0 {
                    let relative = 4.0 * radius * radius * out.epsilon * out.epsilon / delta_cum;
                    if d > relative + tol {
                        return Err(violation(
                            t,
                            format!("delta_t = {d} > 4 R^2 eps_t^2 / delta_1:t-1 = {relative}"),
                        ));
                    }
                }
                let ceiling = 2.0 * 3f64.sqrt() * radius * energy.sqrt();
                if delta_cum + d > ceiling + tol {
                    return Err(violation(
                        t,
                        format!("delta_1:t = {} > 2 sqrt3 R sqrt(E_t) = {ceiling}", delta_cum + d),
                    ));
                }
            }
        }
        delta_cum += out.delta_t.unwrap_or(0.0);
        sigma_cum_prev = out.sigma_cum;
        trace.records.push(SlotRecord {
            t,
            loss: dot(c, &x_t),
            comparator_loss: dot(c, u),
            x: x_t,
            epsilon: out.epsilon,
            sigma_t: out.sigma_t,
            sigma_cum: out.sigma_cum,
            state_norm: out.state_norm,
            delta: out.delta_t,
            pruned: out.pruned,
        });
    }
    Ok(trace)
}

fn run_baseline(
    scenario: &Scenario,
    comparators: &[Vec<f64>],
    kind: BaselineKind,
    tuning: BaselineTuning,
    check: bool,
) -> Result<Trace> {
    let set = &scenario.set;
    let zero = vec![0.0; set.dim()];
    let mut state = BaselineState::new(kind, set, tuning, Some(scenario.prediction(1)?))?;
    let mut trace = Trace::new(kind.as_str(), None, set.radius());
    trace.records.reserve(scenario.horizon);
    for t in 1..=scenario.horizon {
        let c = scenario.cost(t)?;
        let u = &comparators[t - 1];
        let x_t = state.x_current.clone();
        if check {
            check_feasible(set, &x_t, t)?;
        }
        let (pred_t, pred_next) = if kind.is_optimistic() {
            (scenario.prediction(t)?, scenario.prediction(t + 1)?)
        } else {
            (zero.as_slice(), zero.as_slice())
        };
        let before = state.regularization;
        state.step(c, pred_t, pred_next, set)?;
        trace.records.push(SlotRecord {
            t,
            loss: dot(c, &x_t),
            comparator_loss: dot(c, u),
            x: x_t,
            epsilon: dist(c, pred_t),
            sigma_t: state.regularization - before,
            sigma_cum: state.regularization,
            state_norm: state.state_norm(),
            delta: None,
            pruned: false,
        });
    }
    Ok(trace)
}

/// Builds the scenario, runs the learner against per-slot minimizers and
/// evaluates the metrics.
pub fn run_experiment(config: &RunConfig) -> Result<(Trace, MetricsReport)> {
    let scenario = config.build_scenario()?;
    let comparators = comparator_sequence(&scenario)?;
    let trace = run_scenario(&scenario, &comparators, &config.learner, config.check_invariants)?;
    let report = MetricsReport::from_trace(&trace)?;
    Ok((trace, report))
}

/// Runs independent configurations in parallel; results keep the input order.
pub fn run_many(configs: &[RunConfig]) -> Vec<Result<(Trace, MetricsReport)>> {
    configs.par_iter().map(run_experiment).collect()
}
