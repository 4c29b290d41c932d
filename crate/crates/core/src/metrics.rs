//! Regret accounting and the complexity measures the regret bounds are
//! stated in.
//!
//! Notation used below, for comparators `u_1..u_T` and prediction errors
//! `eps_t`:
//!
//! - path length `P_T = sum_{t<T} |u_{t+1} - u_t|`, augmented `P'_t = 2R + P_t`
//! - error energy `E_t = sum_{s<=t} eps_s^2`
//! - hybrid term `H_T = sum_{t<T} eps_t |u_{t+1} - u_t|`

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::regularizers::{StrategyConfig, StrategyKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub loss: f64,
    pub comparator_loss: f64,
    pub epsilon: f64,
    pub sigma_t: f64,
    pub sigma_cum: f64,
    pub state_norm: f64,
    pub delta: Option<f64>,
    pub pruned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Learner label as used on the command line.
    pub algo: String,
    /// Present for OptFPRL runs only.
    pub strategy: Option<StrategyConfig>,
    pub radius: f64,
    pub records: Vec<SlotRecord>,
    pub comparators: Vec<Vec<f64>>,
    /// `key=value` pairs written as comment rows in exports.
    pub metadata: Vec<(String, String)>,
}

impl Trace {
    pub fn new(algo: impl Into<String>, strategy: Option<StrategyConfig>, radius: f64) -> Self {
        Self {
            algo: algo.into(),
            strategy,
            radius,
            records: Vec::new(),
            comparators: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.epsilon).collect()
    }

    /// Running average regret `R_t / t` for every slot.
    pub fn average_regret_series(&self) -> Vec<f64> {
        let mut cum = 0.0;
        self.records
            .iter()
            .map(|r| {
                cum += r.loss - r.comparator_loss;
                cum / r.t as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub algo: String,
    pub strategy: Option<String>,
    pub horizon: usize,
    pub regret_cum: f64,
    pub regret_avg: f64,
    pub path_length: f64,
    pub pred_energy: f64,
    pub hybrid: f64,
    pub corrective: f64,
    /// Regret bound for OptFPRL traces, absent for baselines.
    pub bound_value: Option<f64>,
    pub bound_satisfied: Option<bool>,
}

impl MetricsReport {
    pub fn from_trace(trace: &Trace) -> Result<Self> {
        let regret_cum = dynamic_regret(trace);
        let horizon = trace.horizon();
        let (pred_energy, hybrid) = pred_energy_and_hybrid(trace)?;
        let corrective = corrective_a(trace)?;
        let bound_value = match &trace.strategy {
            Some(s) => Some(theorem_bound(trace, s)?),
            None => None,
        };
        Ok(Self {
            algo: trace.algo.clone(),
            strategy: trace.strategy.map(|s| s.kind.name().to_string()),
            horizon,
            regret_cum,
            regret_avg: if horizon == 0 { 0.0 } else { regret_cum / horizon as f64 },
            path_length: path_length(&trace.comparators),
            pred_energy,
            hybrid,
            corrective,
            bound_value,
            bound_satisfied: bound_value.map(|b| regret_cum <= b + 1e-6),
        })
    }
}

/// `sum_t f_t(x_t) - f_t(u_t)`
pub fn dynamic_regret(trace: &Trace) -> f64 {
    trace
        .records
        .iter()
        .map(|r| r.loss - r.comparator_loss)
        .sum()
}

/// Per-slot comparator movement `|u_{t+1} - u_t|` for `t = 1..T-1`.
pub fn comparator_steps(comparators: &[Vec<f64>]) -> Vec<f64> {
    comparators.windows(2).map(|w| dist(&w[1], &w[0])).collect()
}

pub fn path_length(comparators: &[Vec<f64>]) -> f64 {
    comparator_steps(comparators).iter().sum()
}

fn check_aligned(trace: &Trace) -> Result<()> {
    if trace.comparators.len() != trace.records.len() {
        return Err(Error::InvalidParameter(format!(
            "trace has {} records but {} comparators",
            trace.records.len(),
            trace.comparators.len()
        )));
    }
    Ok(())
}

/// `(E_T, H_T)`
pub fn pred_energy_and_hybrid(trace: &Trace) -> Result<(f64, f64)> {
    check_aligned(trace)?;
    Ok(energy_and_hybrid(&trace.epsilons(), &comparator_steps(&trace.comparators)))
}

pub fn energy_and_hybrid(eps: &[f64], steps: &[f64]) -> (f64, f64) {
    let energy = eps.iter().map(|e| e * e).sum();
    let hybrid = eps.iter().zip(steps).map(|(e, s)| e * s).sum();
    (energy, hybrid)
}

/// Running `P'_t = 2R + sum_{s<t} |u_{s+1} - u_s|` for `t = 1..T`.
pub fn augmented_path_series(comparators: &[Vec<f64>], radius: f64) -> Vec<f64> {
    let mut acc = 2.0 * radius;
    let mut out = Vec::with_capacity(comparators.len());
    for (i, u) in comparators.iter().enumerate() {
        if i > 0 {
            acc += dist(u, &comparators[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Corrective term for non-monotone `r_t = sqrt(E_t / P'_t)`:
///
/// ```text
/// A_T = sum_{t<T} |u_{t+1} - u_t| sum_{2<=s<=t, r_s < r_{s-1}} (r_{s-1} - r_s)
/// ```
///
/// `energy[i]` and `ppath[i]` hold `E_{i+1}` and `P'_{i+1}`; `steps[i]` holds
/// `|u_{i+2} - u_{i+1}|`.
pub fn corrective_a_series(energy: &[f64], ppath: &[f64], steps: &[f64]) -> f64 {
    let ratio: Vec<f64> = energy
        .iter()
        .zip(ppath)
        .map(|(e, p)| (e / p).sqrt())
        .collect();
    let mut drops = 0.0;
    let mut total = 0.0;
    for (i, step) in steps.iter().enumerate() {
        if i >= 1 && i < ratio.len() && ratio[i] < ratio[i - 1] {
            drops += ratio[i - 1] - ratio[i];
        }
        total += drops * step;
    }
    total
}

/// `A_T` from a trace's errors and comparators.
pub fn corrective_a(trace: &Trace) -> Result<f64> {
    check_aligned(trace)?;
    let mut e = 0.0;
    let energy: Vec<f64> = trace
        .records
        .iter()
        .map(|r| {
            e += r.epsilon * r.epsilon;
            e
        })
        .collect();
    let ppath = augmented_path_series(&trace.comparators, trace.radius);
    Ok(corrective_a_series(
        &energy,
        &ppath,
        &comparator_steps(&trace.comparators),
    ))
}

/// Right-hand side of the regret bound that matches the strategy the trace
/// was produced with, evaluated from the measured path length.
pub fn theorem_bound(trace: &Trace, strategy: &StrategyConfig) -> Result<f64> {
    match &trace.strategy {
        Some(s) if s.kind.name() == strategy.kind.name() => {}
        Some(s) => {
            return Err(Error::StrategyMismatch(format!(
                "trace was produced with {} but the {} bound was requested",
                s.kind.name(),
                strategy.kind.name()
            )))
        }
        None => {
            return Err(Error::StrategyMismatch(format!(
                "trace of '{}' has no regularization strategy",
                trace.algo
            )))
        }
    }
    let r = strategy.radius;
    let steps = comparator_steps(&trace.comparators);
    let path: f64 = steps.iter().sum();
    let (energy, hybrid) = pred_energy_and_hybrid(trace)?;
    let root_e = energy.sqrt();
    Ok(match strategy.kind {
        StrategyKind::Agnostic => (5.8 * r + 0.5 * path) * root_e + hybrid,
        StrategyKind::KnownPath { .. } => {
            let lead = 4.0 * (r * (2.0 * r + path)).sqrt() + r / 8.0 + (r * path / 2.0).sqrt();
            lead * root_e + hybrid
        }
        StrategyKind::ObservedPath => {
            let ppath = 2.0 * r + path;
            5.5 * r.sqrt() * (energy * ppath).sqrt() + hybrid + (r / 2.0).sqrt() * corrective_a(trace)?
        }
        StrategyKind::Recursive => {
            let mut prefix = 0.0;
            let mut weighted = 0.0;
            for (i, rec) in trace.records.iter().enumerate() {
                let d = rec.delta.ok_or_else(|| {
                    Error::StrategyMismatch(format!("slot {} has no delta record", rec.t))
                })?;
                prefix += d;
                if let Some(step) = steps.get(i) {
                    weighted += prefix * step;
                }
            }
            1.1 * prefix + weighted / (4.0 * r) + hybrid
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn record(t: usize, loss: f64, comparator_loss: f64, epsilon: f64) -> SlotRecord {
        SlotRecord {
            t,
            x: vec![0.0],
            loss,
            comparator_loss,
            epsilon,
            sigma_t: 0.0,
            sigma_cum: 0.0,
            state_norm: 0.0,
            delta: None,
            pruned: false,
        }
    }

    fn trace_1d(eps: &[f64], us: &[f64], strategy: Option<StrategyKind>) -> Trace {
        let mut tr = Trace::new(
            "optfprl",
            strategy.map(|k| StrategyConfig::new(k, 2.0).unwrap()),
            2.0,
        );
        tr.records = eps
            .iter()
            .enumerate()
            .map(|(i, e)| record(i + 1, 0.0, 0.0, *e))
            .collect();
        tr.comparators = us.iter().map(|u| vec![*u]).collect();
        tr
    }

    #[test]
    fn regret_examples() {
        let mut tr = trace_1d(&[0.0], &[-2.0], None);
        assert_eq!(dynamic_regret(&tr), 0.0);
        tr.records[0].loss = 2.0;
        tr.records[0].comparator_loss = -2.0;
        assert_eq!(dynamic_regret(&tr), 4.0);
    }

    #[test]
    fn path_examples() {
        assert_eq!(path_length(&vec![vec![1.0, 1.0]; 5]), 0.0);
        assert_eq!(path_length(&[vec![-2.0], vec![2.0], vec![-2.0]]), 8.0);
        assert_eq!(path_length(&[vec![0.3]]), 0.0);
        let mut us = vec![vec![0.5; 16]; 1000];
        us.extend(vec![vec![-0.5; 16]; 4000]);
        assert_relative_eq!(path_length(&us), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_hybrid_examples() {
        let tr = trace_1d(&[0.0, 0.0], &[1.0, -1.0], None);
        assert_eq!(pred_energy_and_hybrid(&tr).unwrap(), (0.0, 0.0));
        let tr = trace_1d(&[1.0, 1.0], &[1.0, 1.0], None);
        assert_eq!(pred_energy_and_hybrid(&tr).unwrap(), (2.0, 0.0));
        let tr = trace_1d(&[1.0, 2.0], &[0.0, 3.0], None);
        assert_eq!(pred_energy_and_hybrid(&tr).unwrap(), (5.0, 3.0));
    }

    #[test]
    fn corrective_examples() {
        // monotone ratio root
        assert_eq!(
            corrective_a_series(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0], &[1.0, 1.0]),
            0.0
        );
        // static comparator
        assert_eq!(
            corrective_a_series(&[4.0, 4.0, 4.0], &[4.0, 8.0, 16.0], &[0.0, 0.0]),
            0.0
        );
        // ratio roots 0.5, 0.4, 0.45 and one jump of 4 between slots 2 and 3
        let e = [0.25, 0.16, 0.2025];
        let p = [1.0, 1.0, 1.0];
        assert_relative_eq!(corrective_a_series(&e, &p, &[0.0, 4.0]), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn bound_examples() {
        let tr = trace_1d(&[0.0, 0.0, 0.0], &[-2.0, 2.0, -2.0], Some(StrategyKind::Agnostic));
        let s = tr.strategy.unwrap();
        assert_eq!(theorem_bound(&tr, &s).unwrap(), 0.0);
        let tr = trace_1d(&[2.0, 0.0], &[1.0, 1.0], Some(StrategyKind::Agnostic));
        assert_relative_eq!(theorem_bound(&tr, &s).unwrap(), 23.2, epsilon = 1e-12);

        let mut tr = trace_1d(&[0.0, 0.0], &[1.0, 1.0], Some(StrategyKind::Recursive));
        tr.records[0].delta = Some(0.25);
        tr.records[1].delta = Some(0.75);
        let s = tr.strategy.unwrap();
        assert_relative_eq!(theorem_bound(&tr, &s).unwrap(), 1.1, epsilon = 1e-12);
    }

    #[test]
    fn bound_mismatch() {
        let tr = trace_1d(&[1.0], &[1.0], Some(StrategyKind::Agnostic));
        let other = StrategyConfig::new(StrategyKind::Recursive, 2.0).unwrap();
        assert!(matches!(theorem_bound(&tr, &other), Err(Error::StrategyMismatch(_))));
        let plain = trace_1d(&[1.0], &[1.0], None);
        assert!(theorem_bound(&plain, &other).is_err());
        let missing = trace_1d(&[1.0], &[1.0], Some(StrategyKind::Recursive));
        assert!(theorem_bound(&missing, &other).is_err());
    }

    #[test]
    fn report_flags_bound() {
        let mut tr = trace_1d(&[1.0], &[0.0], Some(StrategyKind::Agnostic));
        tr.records[0].loss = 1.0;
        let rep = MetricsReport::from_trace(&tr).unwrap();
        assert_eq!(rep.regret_cum, 1.0);
        assert_eq!(rep.bound_satisfied, Some(true));
        tr.records[0].loss = 100.0;
        let rep = MetricsReport::from_trace(&tr).unwrap();
        assert_eq!(rep.bound_satisfied, Some(false));
        let empty = trace_1d(&[], &[], Some(StrategyKind::Agnostic));
        let rep = MetricsReport::from_trace(&empty).unwrap();
        assert_eq!((rep.regret_cum, rep.regret_avg, rep.horizon), (0.0, 0.0, 0));
    }
}
