//! Cost and prediction streams.
//!
//! The six fixed scenarios use linear costs `c_t = v_t * 1` (all coordinates
//! equal) on a centered ball:
//!
//! | id | `v_t` |
//! |----|-------|
//! | 1 | -1 for `t <= 1000`, +1 afterwards |
//! | 2 | -1 on `[1, 1000]`, `[2000, 2500]`, `[3500, 3750]`, +1 otherwise |
//! | 3 | -1, -5, -10 on the same three ranges, +1 otherwise |
//! | 4 | +1 / -1 alternating every 50 slots, starting with +1 |
//! | 5 | +1 / -0.1 alternating every 50 slots |
//! | 6 | as 4, with predictions `c_t - c_t / (0.1 t)` |
//!
//! Scenarios 1-5 come with zero predictions. Range ends are inclusive.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::norm;

pub const DEFAULT_HORIZON: usize = 5000;
pub const DEFAULT_DIM: usize = 16;
pub const DEFAULT_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Fixed(u8),
    Random,
}

impl ScenarioId {
    pub fn fixed(id: u8) -> Result<Self> {
        if (1..=6).contains(&id) {
            Ok(ScenarioId::Fixed(id))
        } else {
            Err(Error::InvalidParameter(format!("scenario id must be 1..=6, got {id}")))
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Fixed(id) => write!(f, "{id}"),
            ScenarioId::Random => f.write_str("random"),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(ScenarioId::Random);
        }
        let id: u8 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("unknown scenario '{s}'")))?;
        ScenarioId::fixed(id)
    }
}

fn alternating(t: usize, low: f64) -> f64 {
    if ((t - 1) / 50).is_multiple_of(2) {
        1.0
    } else {
        low
    }
}

fn ranged(t: usize, values: [f64; 3]) -> f64 {
    match t {
        1..=1000 => values[0],
        2000..=2500 => values[1],
        3500..=3750 => values[2],
        _ => 1.0,
    }
}

/// Common value of all cost coordinates of a fixed scenario at slot `t >= 1`.
/// Defined for every `t`, so the prediction of slot `T + 1` is available.
pub fn cost_level(id: u8, t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::SlotOutOfRange { slot: 0, horizon: usize::MAX });
    }
    Ok(match id {
        1 => {
            if t <= 1000 {
                -1.0
            } else {
                1.0
            }
        }
        2 => ranged(t, [-1.0, -1.0, -1.0]),
        3 => ranged(t, [-1.0, -5.0, -10.0]),
        4 | 6 => alternating(t, -1.0),
        5 => alternating(t, -0.1),
        _ => return Err(Error::InvalidParameter(format!("scenario id must be 1..=6, got {id}"))),
    })
}

pub fn prediction_level(id: u8, t: usize) -> Result<f64> {
    let c = cost_level(id, t)?;
    Ok(if id == 6 { c - c / (0.1 * t as f64) } else { 0.0 })
}

/// Cost coefficients of a fixed scenario at slot `t` in `1..=horizon`.
pub fn scenario_costs(id: u8, t: usize, dim: usize, horizon: usize) -> Result<Vec<f64>> {
    if t == 0 || t > horizon {
        return Err(Error::SlotOutOfRange { slot: t, horizon });
    }
    Ok(vec![cost_level(id, t)?; dim])
}

/// Settings of the random-instance generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    /// Radius of the sphere the cost vectors are drawn from.
    pub cost_radius: f64,
    /// Standard deviation of the per-coordinate Gaussian prediction noise;
    /// `None` gives zero predictions.
    pub noise: Option<f64>,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            cost_radius: 1.0,
            noise: None,
        }
    }
}

/// A materialized instance: linear costs for slots `1..=T` and linear
/// predictions for slots `1..=T+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub horizon: usize,
    pub set: FeasibleSet,
    pub seed: u64,
    costs: Vec<Vec<f64>>,
    predictions: Vec<Vec<f64>>,
}

impl Scenario {
    pub fn fixed(id: u8, horizon: usize, dim: usize, radius: f64) -> Result<Self> {
        ScenarioId::fixed(id)?;
        let set = FeasibleSet::ball(dim, radius)?;
        let costs = (1..=horizon)
            .map(|t| Ok(vec![cost_level(id, t)?; dim]))
            .collect::<Result<_>>()?;
        let predictions = (1..=horizon + 1)
            .map(|t| Ok(vec![prediction_level(id, t)?; dim]))
            .collect::<Result<_>>()?;
        Ok(Self {
            id: ScenarioId::Fixed(id),
            horizon,
            set,
            seed: 0,
            costs,
            predictions,
        })
    }

    /// The fixed scenario with its standard horizon, dimension and radius.
    pub fn standard(id: u8) -> Result<Self> {
        Self::fixed(id, DEFAULT_HORIZON, DEFAULT_DIM, DEFAULT_RADIUS)
    }

    /// I.i.d. costs uniform on the sphere of radius `spec.cost_radius`.
    pub fn random(set: FeasibleSet, horizon: usize, seed: u64, spec: RandomSpec) -> Result<Self> {
        if !(spec.cost_radius >= 0.0 && spec.cost_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cost radius must be non-negative, got {}",
                spec.cost_radius
            )));
        }
        let noise = match spec.noise {
            Some(s) => Some(
                Normal::new(0.0, s)
                    .map_err(|e| Error::InvalidParameter(format!("noise scale {s}: {e}")))?,
            ),
            None => None,
        };
        let d = set.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut costs = Vec::with_capacity(horizon + 1);
        let mut predictions = Vec::with_capacity(horizon + 1);
        for _ in 0..=horizon {
            let raw: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&raw).max(f64::MIN_POSITIVE);
            let c: Vec<f64> = raw.iter().map(|v| v * spec.cost_radius / n).collect();
            let p = match &noise {
                Some(dist) => c.iter().map(|v| v + dist.sample(&mut rng)).collect(),
                None => vec![0.0; d],
            };
            costs.push(c);
            predictions.push(p);
        }
        // the draw for slot T+1 only feeds the last prediction
        costs.truncate(horizon);
        Ok(Self {
            id: ScenarioId::Random,
            horizon,
            set,
            seed,
            costs,
            predictions,
        })
    }

    /// Replaces the predictions of slots `1..=T` by the costs themselves.
    pub fn with_perfect_predictions(mut self) -> Self {
        for (p, c) in self.predictions.iter_mut().zip(&self.costs) {
            p.clone_from(c);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn cost(&self, t: usize) -> Result<&[f64]> {
        if t == 0 || t > self.horizon {
            return Err(Error::SlotOutOfRange { slot: t, horizon: self.horizon });
        }
        Ok(&self.costs[t - 1])
    }

    /// Prediction for slot `t` in `1..=T+1`.
    pub fn prediction(&self, t: usize) -> Result<&[f64]> {
        if t == 0 || t > self.horizon + 1 {
            return Err(Error::SlotOutOfRange { slot: t, horizon: self.horizon + 1 });
        }
        Ok(&self.predictions[t - 1])
    }

    pub fn costs(&self) -> &[Vec<f64>] {
        &self.costs
    }
}

/// Per-slot minimizers `u_t = argmin_{x in X} <c_t, x>`.
pub fn comparator_sequence(scenario: &Scenario) -> Result<Vec<Vec<f64>>> {
    scenario
        .costs
        .iter()
        .map(|c| scenario.set.linear_argmin(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::path_length;

    #[test]
    fn fixed_examples() {
        assert_eq!(scenario_costs(1, 500, 16, 5000).unwrap(), vec![-1.0; 16]);
        assert_eq!(scenario_costs(3, 2200, 16, 5000).unwrap(), vec![-5.0; 16]);
        assert_eq!(prediction_level(6, 10).unwrap(), 0.0);
        assert!(matches!(
            scenario_costs(1, 5001, 16, 5000),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(scenario_costs(1, 0, 16, 5000).is_err());
        assert!(cost_level(7, 1).is_err());
    }

    #[test]
    fn range_boundaries_are_inclusive() {
        for (t, v) in [(1000, -1.0), (1001, 1.0), (1999, 1.0), (2000, -5.0), (2500, -5.0),
                       (2501, 1.0), (3500, -10.0), (3750, -10.0), (3751, 1.0)] {
            assert_eq!(cost_level(3, t).unwrap(), v, "slot {t}");
        }
        for (t, v) in [(50, 1.0), (51, -1.0), (100, -1.0), (101, 1.0)] {
            assert_eq!(cost_level(4, t).unwrap(), v);
        }
        assert_eq!(cost_level(5, 75).unwrap(), -0.1);
    }

    #[test]
    fn comparator_examples() {
        let sc = Scenario::standard(1).unwrap();
        let us = comparator_sequence(&sc).unwrap();
        assert_eq!(us[0], vec![0.5; 16]);
        assert_eq!(us[1200], vec![-0.5; 16]);
        let switches: Vec<usize> = us
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] != w[1])
            .map(|(i, _)| i + 2)
            .collect();
        assert_eq!(switches, vec![1001]);
        assert!((path_length(&us) - 4.0).abs() < 1e-12);
        let set = FeasibleSet::ball(3, 1.0).unwrap();
        assert_eq!(set.linear_argmin(&[0.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn random_is_deterministic() {
        let set = FeasibleSet::ball(4, 1.0).unwrap();
        let spec = RandomSpec { cost_radius: 2.0, noise: Some(0.3) };
        let a = Scenario::random(set.clone(), 50, 9, spec).unwrap();
        let b = Scenario::random(set.clone(), 50, 9, spec).unwrap();
        let c = Scenario::random(set, 50, 10, spec).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.costs(), c.costs());
        assert!(a.costs().iter().all(|v| (norm(v) - 2.0).abs() < 1e-12));
        assert_eq!(a.costs().len(), 50);
        assert!(a.prediction(51).is_ok());
        assert!(a.cost(51).is_err());
    }
}
