//! Run options from flat `key=value` files, merged with command-line values.
//!
//! Keys mirror the long command-line flags (`scenario`, `algo`, `strategy`,
//! `path-budget`, `cadence`, `horizon`, `dim`, `radius`, `seed`,
//! `check-invariants`, `noise`, `cost-radius`, `out`, `svg`, `summary`).
//! Blank lines and lines starting with `#` are ignored.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::regularizers::StrategyName;

use super::runner::{Algorithm, LearnerSpec, RunConfig};
use super::scenarios::{RandomSpec, ScenarioId};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub scenario: Option<ScenarioId>,
    pub algo: Option<Algorithm>,
    pub strategy: Option<StrategyName>,
    pub path_budget: Option<f64>,
    pub cadence: Option<usize>,
    pub horizon: Option<usize>,
    pub dim: Option<usize>,
    pub radius: Option<f64>,
    pub seed: Option<u64>,
    pub check_invariants: Option<bool>,
    pub noise: Option<f64>,
    pub cost_radius: Option<f64>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// `on`/`off` (also `true`/`false`).
pub fn parse_switch(s: &str) -> Result<bool> {
    match s {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("expected on|off, got '{s}'"))),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("invalid value '{value}' for {key}")))
}

impl RunOptions {
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut o = RunOptions::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected key=value", n + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scenario" => o.scenario = Some(value.parse()?),
                "algo" => o.algo = Some(value.parse()?),
                "strategy" => o.strategy = Some(value.parse()?),
                "path-budget" => o.path_budget = Some(parse(key, value)?),
                "cadence" => o.cadence = Some(parse(key, value)?),
                "horizon" => o.horizon = Some(parse(key, value)?),
                "dim" => o.dim = Some(parse(key, value)?),
                "radius" => o.radius = Some(parse(key, value)?),
                "seed" => o.seed = Some(parse(key, value)?),
                "check-invariants" => o.check_invariants = Some(parse_switch(value)?),
                "noise" => o.noise = Some(parse(key, value)?),
                "cost-radius" => o.cost_radius = Some(parse(key, value)?),
                "out" => o.out = Some(value.into()),
                "svg" => o.svg = Some(value.into()),
                "summary" => o.summary = Some(value.into()),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: unknown key '{key}'",
                        n + 1
                    )))
                }
            }
        }
        Ok(o)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    /// Values set in `over` win.
    pub fn overlay(self, over: RunOptions) -> RunOptions {
        RunOptions {
            scenario: over.scenario.or(self.scenario),
            algo: over.algo.or(self.algo),
            strategy: over.strategy.or(self.strategy),
            path_budget: over.path_budget.or(self.path_budget),
            cadence: over.cadence.or(self.cadence),
            horizon: over.horizon.or(self.horizon),
            dim: over.dim.or(self.dim),
            radius: over.radius.or(self.radius),
            seed: over.seed.or(self.seed),
            check_invariants: over.check_invariants.or(self.check_invariants),
            noise: over.noise.or(self.noise),
            cost_radius: over.cost_radius.or(self.cost_radius),
            out: over.out.or(self.out),
            svg: over.svg.or(self.svg),
            summary: over.summary.or(self.summary),
        }
    }

    /// Fills defaults and rejects combinations that do not apply to the
    /// selected algorithm.
    pub fn to_run_config(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let algo = self.algo.unwrap_or(Algorithm::OptFprl);
        let strategy = self.strategy.unwrap_or(StrategyName::Agnostic);
        if let Algorithm::Baseline(kind) = algo {
            if self.strategy.is_some() || self.path_budget.is_some() || self.cadence.is_some() {
                return Err(Error::InvalidParameter(format!(
                    "strategy, path budget and cadence apply to optfprl only, not {kind}"
                )));
            }
        }
        if self.path_budget.is_some() && strategy != StrategyName::KnownPath {
            return Err(Error::InvalidParameter(
                "path budget applies to the known-path strategy only".into(),
            ));
        }
        if let Some(p) = self.path_budget {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "path budget must be non-negative, got {p}"
                )));
            }
        }
        let scenario = self.scenario.unwrap_or(d.scenario);
        if scenario != ScenarioId::Random && (self.noise.is_some() || self.cost_radius.is_some()) {
            return Err(Error::InvalidParameter(
                "noise and cost radius apply to random scenarios only".into(),
            ));
        }
        let cadence = self.cadence.unwrap_or(1);
        if cadence == 0 {
            return Err(Error::InvalidParameter("cadence must be at least 1".into()));
        }
        Ok(RunConfig {
            scenario,
            horizon: self.horizon.unwrap_or(d.horizon),
            dim: self.dim.unwrap_or(d.dim),
            radius: self.radius.unwrap_or(d.radius),
            seed: self.seed.unwrap_or(d.seed),
            random: RandomSpec {
                cost_radius: self.cost_radius.unwrap_or(1.0),
                noise: self.noise,
            },
            learner: LearnerSpec {
                algo,
                strategy,
                path_budget: self.path_budget,
                cadence,
                tuning: d.learner.tuning,
            },
            check_invariants: self.check_invariants.unwrap_or(true),
        })
    }
}
