//! Property suite run by the `verify` subcommand.
//!
//! Every check returns a [`CheckOutcome`] instead of panicking so that the
//! command can report all of them and set its exit status once.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::BaselineKind;
use crate::error::Result;
use crate::geometry::{FeasibleSet, Shape};
use crate::learner::{Learner, PruneRule};
use crate::linalg::{add, dist, norm};
use crate::metrics::{
    augmented_path_series, corrective_a_series, energy_and_hybrid, path_length,
    pred_energy_and_hybrid, MetricsReport, Trace,
};
use crate::oracles::{Oracle, SquaredDistance};
use crate::regularizers::StrategyName;

use super::export::write_csv;
use super::grid::{grid_minimum, SlotObjective};
use super::runner::{run_scenario, LearnerSpec, INVARIANT_TOLERANCE};
use super::scenarios::{comparator_sequence, RandomSpec, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, r: Result<String>) -> Self {
        match r {
            Ok(detail) => Self::new(name, true, detail),
            Err(e) => Self::new(name, false, e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub random_instances: usize,
    pub bound_instances: usize,
    pub oracle_runs: usize,
    pub orderings: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            random_instances: 100,
            bound_instances: 500,
            oracle_runs: 50,
            orderings: false,
            seed: 2024,
        }
    }
}

const NOISE_LEVELS: [Option<f64>; 5] = [None, Some(0.05), Some(0.3), Some(1.0), Some(3.0)];

/// Deterministic random instance number `index`: dimension cycles through
/// `dims`, the prediction noise through five levels, and every fourth
/// instance uses a box instead of a ball.
pub fn random_instance(seed: u64, index: usize, horizon: usize, dims: &[usize]) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let d = dims[index % dims.len()];
    let set = if index % 4 == 3 {
        FeasibleSet::axis_box((0..d).map(|_| rng.gen_range(0.3..2.0)).collect())?
    } else {
        FeasibleSet::ball(d, rng.gen_range(0.5..3.0))?
    };
    let spec = RandomSpec {
        cost_radius: rng.gen_range(0.2..3.0),
        noise: NOISE_LEVELS[index % NOISE_LEVELS.len()],
    };
    Scenario::random(set, horizon, rng.gen(), spec)
}

fn run_optfprl(scenario: &Scenario, strategy: StrategyName) -> Result<Trace> {
    let comparators = comparator_sequence(scenario)?;
    run_scenario(scenario, &comparators, &LearnerSpec::optfprl(strategy), true)
}

fn state_bound_holds(trace: &Trace) -> Result<()> {
    let r = trace.radius;
    let mut sigma_prev = 0.0;
    for rec in &trace.records {
        let rhs = r * sigma_prev + rec.epsilon;
        if rec.state_norm > rhs + INVARIANT_TOLERANCE {
            return Err(crate::Error::InvariantViolation {
                slot: rec.t,
                inequality: format!("|p_1:t| = {} > {}", rec.state_norm, rhs),
            });
        }
        sigma_prev = rec.sigma_cum;
    }
    Ok(())
}

/// Perfect predictions on the alternating scenario: zero regret and an empty
/// state throughout.
pub fn perfect_prediction_collapse() -> CheckOutcome {
    let run = || -> Result<String> {
        let sc = Scenario::fixed(4, 1000, 16, 2.0)?.with_perfect_predictions();
        let trace = run_optfprl(&sc, StrategyName::Agnostic)?;
        let regret = crate::metrics::dynamic_regret(&trace);
        let max_state = trace.records.iter().map(|r| r.state_norm).fold(0.0, f64::max);
        if regret > 1e-9 || max_state != 0.0 {
            return Err(crate::Error::InvariantViolation {
                slot: 0,
                inequality: format!("regret {regret}, max state norm {max_state}"),
            });
        }
        Ok(format!("regret {regret:e}, state norm 0"))
    };
    CheckOutcome::from_result("perfect-prediction collapse", run())
}

/// State bound on all fixed scenarios and on random instances, every strategy.
pub fn state_bound_suite(opts: &VerifyOptions) -> CheckOutcome {
    let mut jobs: Vec<(Option<u8>, usize, StrategyName)> = Vec::new();
    for id in 1..=6 {
        for s in StrategyName::ALL {
            jobs.push((Some(id), 0, s));
        }
    }
    for i in 0..opts.random_instances {
        for s in StrategyName::ALL {
            jobs.push((None, i, s));
        }
    }
    let results: Vec<Result<()>> = jobs
        .par_iter()
        .map(|(id, i, s)| {
            let sc = match id {
                Some(id) => Scenario::standard(*id)?,
                None => random_instance(opts.seed, *i, 500, &[1, 2, 16])?,
            };
            state_bound_holds(&run_optfprl(&sc, *s)?)
        })
        .collect();
    let failures: Vec<String> = results
        .into_iter()
        .zip(&jobs)
        .filter_map(|(r, j)| r.err().map(|e| format!("{j:?}: {e}")))
        .collect();
    CheckOutcome::new(
        "state bound",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} runs", jobs.len())
        } else {
            failures.join("; ")
        },
    )
}

/// Regret bounds for every strategy and the recursion ceiling for the
/// recursive one, on random instances of horizon 200.
pub fn bound_suite(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut ceiling_failures = Vec::new();
    for s in StrategyName::ALL {
        let results: Vec<Result<(bool, f64, bool)>> = (0..opts.bound_instances)
            .into_par_iter()
            .map(|i| {
                let sc = random_instance(opts.seed.wrapping_add(17), i, 200, &[1, 2, 3, 5, 16])?;
                let trace = run_optfprl(&sc, s)?;
                let rep = MetricsReport::from_trace(&trace)?;
                let slack = rep.bound_value.unwrap_or(f64::NAN) - rep.regret_cum;
                Ok((rep.bound_satisfied == Some(true), slack, recursion_ceiling_holds(&trace)))
            })
            .collect();
        let mut failed = Vec::new();
        let mut min_slack = f64::INFINITY;
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((ok, slack, ceiling)) => {
                    min_slack = min_slack.min(slack);
                    if !ok {
                        failed.push(format!("#{i} (slack {slack})"));
                    }
                    if !ceiling {
                        ceiling_failures.push(format!("#{i}"));
                    }
                }
                Err(e) => failed.push(format!("#{i}: {e}")),
            }
        }
        out.push(CheckOutcome::new(
            &format!("regret bound ({s})"),
            failed.is_empty(),
            if failed.is_empty() {
                format!("{} instances, smallest slack {min_slack:.4}", opts.bound_instances)
            } else {
                failed.join(", ")
            },
        ));
    }
    out.push(CheckOutcome::new(
        "recursion ceiling",
        ceiling_failures.is_empty(),
        if ceiling_failures.is_empty() {
            format!("{} recursive-strategy instances", opts.bound_instances)
        } else {
            ceiling_failures.join(", ")
        },
    ));
    out
}

/// `delta_1:t <= 2 sqrt3 R sqrt(E_t)` at every slot; vacuous for traces
/// without deltas.
pub fn recursion_ceiling_holds(trace: &Trace) -> bool {
    let mut e = 0.0;
    let mut acc = 0.0;
    for rec in &trace.records {
        let Some(d) = rec.delta else { return true };
        e += rec.epsilon * rec.epsilon;
        acc += d;
        if acc > 2.0 * 3f64.sqrt() * trace.radius * e.sqrt() + INVARIANT_TOLERANCE {
            return false;
        }
    }
    true
}

/// One grid comparison of a learner iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct GridComparison {
    pub value_gap: f64,
    pub value_allowance: f64,
    pub position_gap: Option<f64>,
    pub position_allowance: f64,
}

impl GridComparison {
    pub fn passed(&self) -> bool {
        self.value_gap.abs() <= self.value_allowance
            && self.position_gap.is_none_or(|g| g <= self.position_allowance)
    }
}

/// Compares `x` against the grid minimum of the objective.
///
/// Values must agree up to what the grid spacing allows (the learner may
/// only be better, up to solver accuracy). Positions are compared whenever
/// the minimizer is unique and the grid can resolve it, which excludes
/// boundary minimizers of the two-dimensional ball.
pub fn compare_with_grid(
    objective: &SlotObjective,
    set: &FeasibleSet,
    x: &[f64],
    resolution: f64,
) -> Result<GridComparison> {
    let grid = grid_minimum(objective, set, resolution)?;
    let d = set.dim() as f64;
    let r = set.radius();
    let zero = vec![0.0; x.len()];
    // bound on the objective's gradient over the set
    let lipschitz = norm(&objective.p_cum)
        + objective.sigma_cum * r
        + norm(&objective.prediction.subgradient(&zero)?)
        + objective.prediction.strong_convexity() * r;
    let impl_value = objective.value(x)?;
    let value_gap = impl_value - grid.value;
    let value_allowance = if value_gap > 0.0 {
        1e-7
    } else {
        2.0 * lipschitz * resolution * d.sqrt()
    };
    let curvature = objective.sigma_cum + objective.prediction.strong_convexity();
    let linear_part = match objective.prediction.as_linear() {
        Some(c) => add(&objective.p_cum, c),
        None => objective.p_cum.clone(),
    };
    let unique = curvature > 0.0
        || match set.shape() {
            Shape::Ball { .. } => norm(&linear_part) > 1e-12,
            Shape::Box { .. } => linear_part.iter().all(|v| v.abs() > 1e-12),
        };
    let resolvable = match set.shape() {
        Shape::Ball { dim, radius } => *dim == 1 || norm(x) < radius - 2.0 * resolution * d.sqrt(),
        Shape::Box { .. } => true,
    };
    Ok(GridComparison {
        value_gap,
        value_allowance,
        position_gap: (unique && resolvable).then(|| dist(x, &grid.point)),
        position_allowance: resolution * d.sqrt(),
    })
}

/// Random mini-instance number `index` for the grid comparison: one or two
/// dimensions, horizon at most five, small sets so the grid stays cheap.
pub fn oracle_instance(seed: u64, index: usize) -> Result<(FeasibleSet, Vec<Vec<f64>>, Vec<Oracle>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64 * 7919));
    let d = 1 + index % 2;
    let horizon = 1 + index % 5;
    let set = if index % 3 == 2 {
        FeasibleSet::axis_box((0..d).map(|_| rng.gen_range(20..80) as f64 / 100.0).collect())?
    } else if d == 1 {
        FeasibleSet::ball(1, rng.gen_range(5..30) as f64 / 10.0)?
    } else {
        FeasibleSet::ball(2, rng.gen_range(40..90) as f64 / 100.0)?
    };
    let costs: Vec<Vec<f64>> = (0..horizon)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let curved = index % 7 == 5;
    let predictions: Vec<Oracle> = (0..=horizon)
        .map(|t| {
            let base: Vec<f64> = match costs.get(t) {
                Some(c) if !index.is_multiple_of(4) => c.iter().map(|v| v + rng.gen_range(-0.5..0.5)).collect(),
                _ => (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            };
            if curved {
                Oracle::general(Arc::new(SquaredDistance::new(base, 0.5)))
            } else {
                Oracle::linear(base)
            }
        })
        .collect();
    Ok((set, costs, predictions))
}

/// Runs one mini-instance and compares every iterate `x_2..x_{T+1}` (and
/// `x_1`) with the grid.
pub fn oracle_run(
    set: &FeasibleSet,
    costs: &[Vec<f64>],
    predictions: &[Oracle],
    strategy: StrategyName,
    resolution: f64,
) -> Result<Vec<GridComparison>> {
    let comparators: Vec<Vec<f64>> = costs
        .iter()
        .map(|c| set.linear_argmin(c))
        .collect::<Result<_>>()?;
    let spec = LearnerSpec::optfprl(strategy);
    let cfg = spec.strategy_config(set.radius(), &comparators)?;
    let mut learner = Learner::new(set.clone(), predictions[0].clone(), cfg, PruneRule::default())?;
    let mut out = Vec::new();
    let first = SlotObjective {
        p_cum: vec![0.0; set.dim()],
        sigma_cum: 0.0,
        prediction: predictions[0].clone(),
    };
    out.push(compare_with_grid(&first, set, learner.iterate(), resolution)?);
    for (t, c) in costs.iter().enumerate() {
        learner.observe_and_step(
            &Oracle::linear(c.clone()),
            predictions[t + 1].clone(),
            Some(&comparators[t]),
        )?;
        let st = learner.state();
        let objective = SlotObjective {
            p_cum: st.p_cum.clone(),
            sigma_cum: st.sigma_cum,
            prediction: predictions[t + 1].clone(),
        };
        out.push(compare_with_grid(&objective, set, learner.iterate(), resolution)?);
    }
    Ok(out)
}

pub fn oracle_equivalence(opts: &VerifyOptions) -> CheckOutcome {
    let mut failures = Vec::new();
    let mut compared = 0;
    for i in 0..opts.oracle_runs {
        let strategy = StrategyName::ALL[i % 4];
        let res = oracle_instance(opts.seed, i)
            .and_then(|(set, costs, preds)| oracle_run(&set, &costs, &preds, strategy, 1e-3));
        match res {
            Ok(cmp) => {
                compared += cmp.len();
                for (k, c) in cmp.iter().enumerate() {
                    if !c.passed() {
                        failures.push(format!("run {i} iterate {}: {c:?}", k + 1));
                    }
                }
            }
            Err(e) => failures.push(format!("run {i}: {e}")),
        }
    }
    CheckOutcome::new(
        "grid oracle equivalence",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{compared} iterates")
        } else {
            failures.join("; ")
        },
    )
}

/// Hybrid-term growth and corrective-term identities on constructed
/// sequences and on fixed-scenario traces.
pub fn metric_identities() -> CheckOutcome {
    let run = || -> Result<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        for _ in 0..200 {
            let r: f64 = rng.gen_range(0.5..3.0);
            let set = FeasibleSet::ball(3, r)?;
            let n = rng.gen_range(2..60);
            let us: Vec<Vec<f64>> = (0..n).map(|_| set.sample(&mut rng)).collect();
            let eps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let steps = crate::metrics::comparator_steps(&us);
            let (_, hybrid) = energy_and_hybrid(&eps, &steps);
            let e_prev: f64 = eps[..n - 1].iter().map(|e| e * e).sum();
            let p = path_length(&us);
            if hybrid > (2.0 * r * e_prev * p).sqrt() + 1e-9 {
                return Err(crate::Error::InvariantViolation {
                    slot: n,
                    inequality: format!("H_T = {hybrid} above its growth bound"),
                });
            }
            // monotone sqrt(E_t/P'_t): pick increments keeping the ratio non-decreasing
            let ppath = augmented_path_series(&us, r);
            let mut energy = Vec::with_capacity(n);
            let mut e = rng.gen_range(0.0..1.0);
            for t in 0..n {
                if t > 0 {
                    let needed = energy[t - 1] / ppath[t - 1] * ppath[t];
                    e = needed + rng.gen_range(0.0..1.0);
                }
                energy.push(e);
            }
            let a = corrective_a_series(&energy, &ppath, &steps);
            if a != 0.0 {
                return Err(crate::Error::InvariantViolation {
                    slot: n,
                    inequality: format!("A_T = {a} on a monotone ratio series"),
                });
            }
            checked += 1;
        }
        for id in 1..=6 {
            let sc = Scenario::fixed(id, 1000, 4, 2.0)?;
            let trace = run_optfprl(&sc, StrategyName::ObservedPath)?;
            let (energy, _) = pred_energy_and_hybrid(&trace)?;
            let rep = MetricsReport::from_trace(&trace)?;
            let ppath = 2.0 * trace.radius + rep.path_length;
            let worst = energy.sqrt() * ppath / (2.0 * trace.radius).sqrt();
            let e_prev: f64 = trace.records[..trace.records.len() - 1]
                .iter()
                .map(|r| r.epsilon * r.epsilon)
                .sum();
            if rep.corrective > worst + 1e-6
                || rep.hybrid > (2.0 * trace.radius * e_prev * rep.path_length).sqrt() + 1e-9
            {
                return Err(crate::Error::InvariantViolation {
                    slot: trace.horizon(),
                    inequality: format!("scenario {id}: metric identity violated"),
                });
            }
            checked += 1;
        }
        Ok(format!("{checked} sequences"))
    };
    CheckOutcome::from_result("metric identities", run())
}

/// Two identical runs must export identical bytes.
pub fn determinism() -> CheckOutcome {
    let run = || -> Result<String> {
        let export = || -> Result<Vec<u8>> {
            let sc = random_instance(99, 1, 300, &[4])?;
            let trace = run_optfprl(&sc, StrategyName::Recursive)?;
            let rep = MetricsReport::from_trace(&trace)?;
            let mut buf = Vec::new();
            write_csv(&mut buf, &trace, Some(&rep))?;
            Ok(buf)
        };
        let a = export()?;
        let b = export()?;
        if a != b {
            return Err(crate::Error::InvariantViolation {
                slot: 0,
                inequality: "CSV exports differ".into(),
            });
        }
        Ok(format!("{} bytes", a.len()))
    };
    CheckOutcome::from_result("deterministic export", run())
}

/// Final and selected-slot average regrets of OptFPRL (agnostic) and the
/// baselines on the six fixed scenarios.
#[derive(Debug, Clone)]
pub struct ScenarioCurves {
    pub optfprl: Vec<f64>,
    pub ftrl: Vec<f64>,
    pub ogd: Vec<f64>,
    pub opt_ftrl: Vec<f64>,
    pub opt_ogd: Vec<f64>,
}

pub fn scenario_curves(id: u8) -> Result<ScenarioCurves> {
    let sc = Scenario::standard(id)?;
    let comparators = comparator_sequence(&sc)?;
    let specs = [
        LearnerSpec::optfprl(StrategyName::Agnostic),
        LearnerSpec::baseline(BaselineKind::FtrlAdaptive),
        LearnerSpec::baseline(BaselineKind::OgdAdaptive),
        LearnerSpec::baseline(BaselineKind::OptimisticFtrl),
        LearnerSpec::baseline(BaselineKind::OptimisticOgd),
    ];
    let mut curves: Vec<Vec<f64>> = specs
        .par_iter()
        .map(|s| Ok(run_scenario(&sc, &comparators, s, true)?.average_regret_series()))
        .collect::<Result<_>>()?;
    let opt_ogd = curves.pop().unwrap_or_default();
    let opt_ftrl = curves.pop().unwrap_or_default();
    let ogd = curves.pop().unwrap_or_default();
    let ftrl = curves.pop().unwrap_or_default();
    let optfprl = curves.pop().unwrap_or_default();
    Ok(ScenarioCurves {
        optfprl,
        ftrl,
        ogd,
        opt_ftrl,
        opt_ogd,
    })
}

fn last(v: &[f64]) -> f64 {
    v.last().copied().unwrap_or(0.0)
}

fn peak(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// The qualitative orderings on the fixed scenarios.
pub fn scenario_orderings() -> Vec<CheckOutcome> {
    let curves: Vec<Result<ScenarioCurves>> = [1u8, 3, 4, 5, 6]
        .par_iter()
        .map(|id| scenario_curves(*id))
        .collect();
    let mut it = curves.into_iter();
    let mut next = || it.next().expect("five scenarios");
    let mut out = Vec::new();
    let fmt_err = |name: &str, e: crate::Error| CheckOutcome::new(name, false, e.to_string());

    match next() {
        Ok(c) => {
            let (f, o) = (c.ftrl[1899], c.optfprl[1899]);
            out.push(CheckOutcome::new(
                "scenario 1: lazy FTRL at t=1900 at least twice OptFPRL",
                f >= 2.0 * o,
                format!("ftrl {f:.4}, optfprl {o:.4}"),
            ));
        }
        Err(e) => out.push(fmt_err("scenario 1", e)),
    }
    match next() {
        Ok(c) => {
            let ftrl_peak = peak(&c.ftrl[1000..]);
            let (ff, of, op) = (last(&c.ftrl), last(&c.optfprl), peak(&c.optfprl));
            out.push(CheckOutcome::new(
                "scenario 3: FTRL stays near its post-switch peak, OptFPRL recovers",
                ff > 0.5 * ftrl_peak && of < 0.5 * op,
                format!("ftrl {ff:.4} (peak {ftrl_peak:.4}), optfprl {of:.4} (peak {op:.4})"),
            ));
        }
        Err(e) => out.push(fmt_err("scenario 3", e)),
    }
    match next() {
        Ok(c) => {
            let (o, g, f) = (last(&c.optfprl), last(&c.ogd), last(&c.ftrl));
            out.push(CheckOutcome::new(
                "scenario 4: OptFPRL < OGD < FTRL",
                o < g && g < f,
                format!("optfprl {o:.4}, ogd {g:.4}, ftrl {f:.4}"),
            ));
        }
        Err(e) => out.push(fmt_err("scenario 4", e)),
    }
    match next() {
        Ok(c) => {
            let (o, g, f) = (last(&c.optfprl), last(&c.ogd), last(&c.ftrl));
            out.push(CheckOutcome::new(
                "scenario 5: OptFPRL has the largest regret",
                o > g && o > f,
                format!("optfprl {o:.4}, ogd {g:.4}, ftrl {f:.4}"),
            ));
        }
        Err(e) => out.push(fmt_err("scenario 5", e)),
    }
    match next() {
        Ok(c) => {
            let base = last(&c.ftrl);
            let (of, o) = (last(&c.opt_ftrl), last(&c.optfprl));
            out.push(CheckOutcome::new(
                "scenario 6: optimistic FTRL and OptFPRL below 10% of FTRL",
                of < 0.1 * base && o < 0.1 * base,
                format!("opt-ftrl {of:.4}, optfprl {o:.4}, ftrl {base:.4}"),
            ));
        }
        Err(e) => out.push(fmt_err("scenario 6", e)),
    }
    out
}

pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    let mut out = vec![perfect_prediction_collapse(), state_bound_suite(opts)];
    out.extend(bound_suite(opts));
    out.push(oracle_equivalence(opts));
    out.push(metric_identities());
    out.push(determinism());
    if opts.orderings {
        out.extend(scenario_orderings());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let opts = VerifyOptions {
            random_instances: 4,
            bound_instances: 8,
            oracle_runs: 6,
            orderings: false,
            seed: 1,
        };
        for c in run_checks(&opts) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn random_instances_are_reproducible() {
        let a = random_instance(3, 7, 20, &[1, 2]).unwrap();
        let b = random_instance(3, 7, 20, &[1, 2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(matches!(a.set.shape(), Shape::Box { .. }));
    }
}
