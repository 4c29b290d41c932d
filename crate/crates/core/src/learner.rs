//! The pruned optimistic FTRL learner.
//!
//! At slot `t` the learner plays `x_t`, observes `f_t`, and forms the
//! composite linearization `p_t = g_t + g_t^I`, where `g_t^I` is drawn from
//! the normal cone of the feasible set at `x_t`. Whenever the unconstrained
//! minimizer behind `x_t` fell outside the set, `g_t^I` is chosen so that the
//! accumulated state collapses to
//!
//! ```text
//! p_{1:t} = g_t - g~_t - sigma_{1:t-1} x_t,
//! ```
//!
//! which keeps `|p_{1:t}| <= R sigma_{1:t-1} + eps_t` at every slot. The next
//! iterate minimizes `<p_{1:t}, x> + (sigma_{1:t}/2)|x|^2 + f~_{t+1}(x)` over
//! the set.
//!
//! For linear predictions every step is closed form. General convex
//! predictions go through a small first-order inner solver.

use crate::error::{check_dim, Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{add, axpy, dist, dot, norm, norm_sq, scale, sub};
use crate::oracles::{prediction_error, Oracle, OracleForm};
use crate::regularizers::{
    sigma_agnostic, sigma_known_path, sigma_observed_path, sigma_recursive, StrategyConfig,
    StrategyKind,
};

/// Termination settings of the inner solver used for general (non-linear)
/// predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once an accepted step moves the iterate by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
        }
    }
}

/// When pruning opportunities are taken. Slot 1 is always pruned with
/// `g_1^I = -g~_1`, independent of the cadence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneRule {
    /// Minimum number of slots between two executed prunes; 1 prunes at every
    /// opportunity.
    pub cadence: usize,
}

impl Default for PruneRule {
    fn default() -> Self {
        Self { cadence: 1 }
    }
}

impl PruneRule {
    pub fn new(cadence: usize) -> Result<Self> {
        if cadence == 0 {
            return Err(Error::InvalidParameter("prune cadence must be at least 1".into()));
        }
        Ok(Self { cadence })
    }

    fn allows(&self, t: usize, last_prune: Option<usize>) -> bool {
        last_prune.is_none_or(|last| t - last >= self.cadence)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerState {
    /// Pruned state `p_{1:t}`.
    pub p_cum: Vec<f64>,
    /// `sigma_{1:t}`.
    pub sigma_cum: f64,
    /// `E_t`.
    pub e_cum: f64,
    /// Augmented observed path `P'_t` (observed-path strategy only, 0 otherwise).
    pub ppath_cum: f64,
    /// `delta_{1:t}` (recursive strategy only).
    pub delta_cum: f64,
    /// The action for the upcoming slot.
    pub x_current: Vec<f64>,
    /// Whether the unconstrained minimizer behind `x_current` was feasible.
    pub uc_feasible: bool,
    /// Index of the upcoming slot (1-based).
    pub t: usize,
    pub prune: PruneRule,
    pub last_prune: Option<usize>,
    last_comparator: Option<Vec<f64>>,
}

/// Record of one observe-and-step iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub slot: usize,
    /// The action played at this slot.
    pub x_played: Vec<f64>,
    pub x_next: Vec<f64>,
    pub gradient: Vec<f64>,
    pub pruned: bool,
    pub g_i: Vec<f64>,
    pub epsilon: f64,
    pub sigma_t: f64,
    pub sigma_cum_prev: f64,
    pub sigma_cum: f64,
    pub delta_t: Option<f64>,
    /// `|p_{1:t}|` after the update.
    pub state_norm: f64,
    pub next_uc_feasible: bool,
}

impl StepOutcome {
    /// Right-hand side of the state bound `R sigma_{1:t-1} + eps_t`.
    pub fn state_bound(&self, radius: f64) -> f64 {
        radius * self.sigma_cum_prev + self.epsilon
    }
}

/// `-(p_{1:t-1} + g~_t + sigma_{1:t-1} x_t)`: the normal-cone element that
/// replaces the accumulated state when `x_t` came from a projection.
pub fn prune_vector(
    p_cum_prev: &[f64],
    g_pred_t: &[f64],
    sigma_cum_prev: f64,
    x_t: &[f64],
) -> Vec<f64> {
    p_cum_prev
        .iter()
        .zip(g_pred_t)
        .zip(x_t)
        .map(|((p, g), x)| -(p + g + sigma_cum_prev * x))
        .collect()
}

/// `delta_1 = <g_1, x_1> - min_{x in X} <g_1, x>`.
pub fn first_delta(g_1: &[f64], x_1: &[f64], set: &FeasibleSet) -> Result<f64> {
    let best = set.linear_argmin(g_1)?;
    let gap = dot(g_1, x_1) - dot(g_1, &best);
    Ok(gap.max(0.0))
}

/// Regularized-loss gap of `x_t` for `<q, x> + (sigma_{1:t-1}/2)|x|^2` with
/// `q = p_{1:t-1} + p_t`, against its constrained minimizer.
pub fn delta_increment(
    p_cum_prev: &[f64],
    p_t: &[f64],
    sigma_cum_prev: f64,
    x_t: &[f64],
    set: &FeasibleSet,
) -> Result<f64> {
    check_dim(p_cum_prev.len(), p_t.len())?;
    let q = add(p_cum_prev, p_t);
    let value = |x: &[f64]| dot(&q, x) + 0.5 * sigma_cum_prev * norm_sq(x);
    let best = set.linear_quadratic_argmin(&q, sigma_cum_prev)?;
    let at_x = value(x_t);
    let gap = at_x - value(&best);
    debug_assert!(
        gap >= -1e-12 * at_x.abs().max(1.0),
        "negative regularized-loss gap {gap}"
    );
    Ok(gap.max(0.0))
}

fn slot_objective(p: &[f64], sigma: f64, prediction: &Oracle, x: &[f64]) -> Result<f64> {
    Ok(dot(p, x) + 0.5 * sigma * norm_sq(x) + prediction.evaluate(x)?)
}

fn slot_gradient(p: &[f64], sigma: f64, prediction: &Oracle, x: &[f64]) -> Result<Vec<f64>> {
    let g = prediction.subgradient(x)?;
    Ok(p.iter()
        .zip(x)
        .zip(&g)
        .map(|((pi, xi), gi)| pi + sigma * xi + gi)
        .collect())
}

/// Minimizer of `<p, x> + (sigma/2)|x|^2 + f~(x)` over all of R^d, or `None`
/// when no minimizer exists (no strong convexity from either term).
pub fn unconstrained_iterate(
    p_cum: &[f64],
    sigma_cum: f64,
    prediction: &Oracle,
    solver: &SolverConfig,
) -> Result<Option<Vec<f64>>> {
    check_dim(prediction.dim(), p_cum.len())?;
    match prediction.form() {
        OracleForm::Linear(c) => {
            if sigma_cum > 0.0 {
                Ok(Some(
                    p_cum
                        .iter()
                        .zip(c)
                        .map(|(p, ci)| -(p + ci) / sigma_cum)
                        .collect(),
                ))
            } else {
                Ok(None)
            }
        }
        OracleForm::General(_) => {
            let curvature = sigma_cum + prediction.strong_convexity();
            if curvature <= 0.0 {
                return Ok(None);
            }
            let start = if sigma_cum > 0.0 {
                scale(p_cum, -1.0 / sigma_cum)
            } else {
                vec![0.0; p_cum.len()]
            };
            descend(p_cum, sigma_cum, prediction, None, start, curvature, solver).map(Some)
        }
    }
}

/// Minimizer of `<p, x> + (sigma/2)|x|^2 + f~(x)` over the set.
pub fn constrained_iterate(
    p_cum: &[f64],
    sigma_cum: f64,
    prediction: &Oracle,
    set: &FeasibleSet,
    solver: &SolverConfig,
) -> Result<Vec<f64>> {
    Ok(next_iterate(p_cum, sigma_cum, prediction, set, solver)?.0)
}

/// Returns the constrained iterate and whether the unconstrained one was feasible.
fn next_iterate(
    p_cum: &[f64],
    sigma_cum: f64,
    prediction: &Oracle,
    set: &FeasibleSet,
    solver: &SolverConfig,
) -> Result<(Vec<f64>, bool)> {
    check_dim(set.dim(), p_cum.len())?;
    let uc = unconstrained_iterate(p_cum, sigma_cum, prediction, solver)?;
    if let Some(x) = &uc {
        if set.contains(x)? {
            return Ok((uc.unwrap(), true));
        }
    }
    let x = match prediction.form() {
        OracleForm::Linear(c) => set.linear_quadratic_argmin(&add(p_cum, c), sigma_cum)?,
        OracleForm::General(_) => {
            let start = match &uc {
                Some(x) => set.project(x)?,
                None => vec![0.0; p_cum.len()],
            };
            let curvature = sigma_cum + prediction.strong_convexity();
            descend(p_cum, sigma_cum, prediction, Some(set), start, curvature, solver)?
        }
    };
    Ok((x, false))
}

/// Backtracking (projected) subgradient descent on the slot objective.
///
/// Steps start at `1/curvature` (or a diameter-scaled step when the objective
/// has no curvature) and halve until a sufficient-decrease test passes. The
/// method stops when an accepted step moves less than the tolerance, or when
/// no step above the tolerance decreases the objective.
fn descend(
    p: &[f64],
    sigma: f64,
    prediction: &Oracle,
    set: Option<&FeasibleSet>,
    start: Vec<f64>,
    curvature: f64,
    solver: &SolverConfig,
) -> Result<Vec<f64>> {
    let mut x = start;
    let mut movement = f64::INFINITY;
    for _ in 0..solver.max_iterations {
        let g = slot_gradient(p, sigma, prediction, &x)?;
        let g_norm = norm(&g);
        if g_norm == 0.0 {
            return Ok(x);
        }
        let fx = slot_objective(p, sigma, prediction, &x)?;
        let mut step = if curvature > 0.0 {
            1.0 / curvature
        } else {
            let diameter = set.map_or(1.0, |s| 2.0 * s.radius());
            diameter / g_norm
        };
        let candidate = loop {
            let raw = axpy(&x, -step, &g);
            let cand = match set {
                Some(s) => s.project(&raw)?,
                None => raw,
            };
            let d = sub(&cand, &x);
            let d_norm = norm(&d);
            if d_norm == 0.0 {
                // projected gradient vanishes: x is stationary
                return Ok(x);
            }
            let f_cand = slot_objective(p, sigma, prediction, &cand)?;
            let accept = match set {
                Some(_) => f_cand <= fx + dot(&g, &d) + norm_sq(&d) / (2.0 * step),
                None => f_cand <= fx - 1e-4 * step * g_norm * g_norm,
            };
            if accept {
                break cand;
            }
            step *= 0.5;
            if step * g_norm < solver.tolerance {
                return Ok(x);
            }
        };
        movement = dist(&candidate, &x);
        x = candidate;
        if movement < solver.tolerance {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        iterations: solver.max_iterations,
        movement,
    })
}

/// An OptFPRL learner: feasible set, regularization strategy, state and the
/// prediction for the upcoming slot.
#[derive(Debug, Clone)]
pub struct Learner {
    set: FeasibleSet,
    strategy: StrategyConfig,
    solver: SolverConfig,
    state: LearnerState,
    prediction: Oracle,
}

impl Learner {
    /// Starts at the constrained minimizer of the first prediction.
    pub fn new(
        set: FeasibleSet,
        first_prediction: Oracle,
        strategy: StrategyConfig,
        prune: PruneRule,
    ) -> Result<Self> {
        Self::with_solver(set, first_prediction, strategy, prune, SolverConfig::default())
    }

    pub fn with_solver(
        set: FeasibleSet,
        first_prediction: Oracle,
        strategy: StrategyConfig,
        prune: PruneRule,
        solver: SolverConfig,
    ) -> Result<Self> {
        check_dim(set.dim(), first_prediction.dim())?;
        if (strategy.radius - set.radius()).abs() > 1e-12 * set.radius() {
            return Err(Error::InvalidParameter(format!(
                "strategy radius {} does not match the set radius {}",
                strategy.radius,
                set.radius()
            )));
        }
        PruneRule::new(prune.cadence)?;
        let d = set.dim();
        let zeros = vec![0.0; d];
        let x_1 = constrained_iterate(&zeros, 0.0, &first_prediction, &set, &solver)?;
        let state = LearnerState {
            p_cum: zeros,
            sigma_cum: 0.0,
            e_cum: 0.0,
            ppath_cum: 0.0,
            delta_cum: 0.0,
            x_current: x_1,
            // no regularization yet: treated as having no unconstrained minimizer
            uc_feasible: false,
            t: 1,
            prune,
            last_prune: None,
            last_comparator: None,
        };
        Ok(Self {
            set,
            strategy,
            solver,
            state,
            prediction: first_prediction,
        })
    }

    pub fn state(&self) -> &LearnerState {
        &self.state
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn strategy(&self) -> &StrategyConfig {
        &self.strategy
    }

    /// The action for the upcoming slot.
    pub fn iterate(&self) -> &[f64] {
        &self.state.x_current
    }

    /// The prediction for the upcoming slot.
    pub fn prediction(&self) -> &Oracle {
        &self.prediction
    }

    /// Runs one full iteration: observe `f_t` at `x_t`, prune, update the
    /// state and the regularization, then compute `x_{t+1}` from the
    /// prediction `f~_{t+1}`.
    ///
    /// `comparator` is `u_t`; it is required by the observed-path strategy and
    /// ignored otherwise.
    pub fn observe_and_step(
        &mut self,
        cost: &Oracle,
        next_prediction: Oracle,
        comparator: Option<&[f64]>,
    ) -> Result<StepOutcome> {
        let d = self.set.dim();
        check_dim(d, cost.dim())?;
        check_dim(d, next_prediction.dim())?;
        let radius = self.strategy.radius;
        let st = &self.state;
        let t = st.t;
        let x_t = st.x_current.clone();

        let g = cost.subgradient(&x_t)?;
        let g_pred = self.prediction.subgradient(&x_t)?;
        let eps = prediction_error(&g, &g_pred)?;
        let sigma_prev = st.sigma_cum;

        let (g_i, pruned) = if t == 1 {
            // sigma_{1:0} = 0 leaves x_1^uc undefined, so slot 1 always prunes:
            // g_1^I = -g~_1, which is -g_1 when eps_1 = 0 and 0 for a zero prediction
            let g_i = prune_vector(&st.p_cum, &g_pred, 0.0, &x_t);
            let active = eps == 0.0 || g_pred.iter().any(|v| *v != 0.0);
            (g_i, active)
        } else if !st.uc_feasible && st.prune.allows(t, st.last_prune) {
            (prune_vector(&st.p_cum, &g_pred, sigma_prev, &x_t), true)
        } else {
            (vec![0.0; d], false)
        };
        if pruned && self.prediction.as_linear().is_some() {
            debug_assert!(
                self.set.normal_cone_gap(&g_i, &x_t)? <= 1e-9 * norm(&g_i).max(1.0) * radius.max(1.0),
                "pruning vector outside the normal cone at slot {t}"
            );
        }

        let p_t = add(&g, &g_i);
        let delta_t = match self.strategy.kind {
            StrategyKind::Recursive => Some(if t == 1 {
                first_delta(&g, &x_t, &self.set)?
            } else {
                delta_increment(&st.p_cum, &p_t, sigma_prev, &x_t, &self.set)?
            }),
            _ => None,
        };

        let e_prev = st.e_cum;
        let e_now = e_prev + eps * eps;
        let ppath_prev = st.ppath_cum;
        let ppath_now = match self.strategy.kind {
            StrategyKind::ObservedPath => {
                let u = comparator.ok_or(Error::MissingComparator { slot: t })?;
                check_dim(d, u.len())?;
                match &st.last_comparator {
                    Some(prev) if t > 1 => ppath_prev + dist(u, prev),
                    _ => 2.0 * radius,
                }
            }
            _ => 0.0,
        };

        let sigma_t = match self.strategy.kind {
            StrategyKind::Agnostic => sigma_agnostic(eps, e_prev, radius, t),
            StrategyKind::KnownPath { path_budget } => {
                sigma_known_path(eps, e_prev, radius, path_budget, t)
            }
            StrategyKind::ObservedPath => {
                sigma_observed_path(eps, e_now, e_prev, ppath_now, ppath_prev, radius, t)?
            }
            StrategyKind::Recursive => sigma_recursive(delta_t.unwrap_or(0.0), radius),
        };

        let p_cum = add(&st.p_cum, &p_t);
        let sigma_cum = sigma_prev + sigma_t;
        let (x_next, next_uc_feasible) =
            next_iterate(&p_cum, sigma_cum, &next_prediction, &self.set, &self.solver)?;
        let state_norm = norm(&p_cum);

        let st = &mut self.state;
        st.p_cum = p_cum;
        st.sigma_cum = sigma_cum;
        st.e_cum = e_now;
        st.ppath_cum = ppath_now;
        if let Some(dt) = delta_t {
            st.delta_cum += dt;
        }
        st.x_current = x_next.clone();
        st.uc_feasible = next_uc_feasible;
        if pruned {
            st.last_prune = Some(t);
        }
        if let Some(u) = comparator {
            st.last_comparator = Some(u.to_vec());
        }
        st.t += 1;
        self.prediction = next_prediction;

        Ok(StepOutcome {
            slot: t,
            x_played: x_t,
            x_next,
            gradient: g,
            pruned,
            g_i,
            epsilon: eps,
            sigma_t,
            sigma_cum_prev: sigma_prev,
            sigma_cum,
            delta_t,
            state_norm,
            next_uc_feasible,
        })
    }
}
