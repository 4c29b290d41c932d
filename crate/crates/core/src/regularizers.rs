//! Schedules for the strong-convexity increments `sigma_t` of the scaled
//! Euclidean regularizers `r_t(x) = (sigma_t / 2) |x|^2`.
//!
//! All schedules are pure functions of the running statistics, which the
//! learner accumulates and passes in explicitly.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    /// `sigma_{1:t} = sqrt(E_t) / (4R)`; needs no knowledge of the comparator.
    Agnostic,
    /// Tuned to a path-length budget `P_T` known in advance.
    KnownPath { path_budget: f64 },
    /// Tracks `sqrt(E_t / P'_t)` using the comparator path observed so far.
    ObservedPath,
    /// Increments proportional to the realized regularized-loss gap `delta_t`.
    Recursive,
}

impl StrategyKind {
    pub fn name(&self) -> StrategyName {
        match self {
            StrategyKind::Agnostic => StrategyName::Agnostic,
            StrategyKind::KnownPath { .. } => StrategyName::KnownPath,
            StrategyKind::ObservedPath => StrategyName::ObservedPath,
            StrategyKind::Recursive => StrategyName::Recursive,
        }
    }
}

/// Strategy label without parameters, as used on the command line and in CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyName {
    Agnostic,
    KnownPath,
    ObservedPath,
    Recursive,
}

impl StrategyName {
    pub const ALL: [StrategyName; 4] = [
        StrategyName::Agnostic,
        StrategyName::KnownPath,
        StrategyName::ObservedPath,
        StrategyName::Recursive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyName::Agnostic => "agnostic",
            StrategyName::KnownPath => "known-path",
            StrategyName::ObservedPath => "observed-path",
            StrategyName::Recursive => "recursive",
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub radius: f64,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if let StrategyKind::KnownPath { path_budget } = kind {
            if !(path_budget >= 0.0 && path_budget.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "path budget must be non-negative, got {path_budget}"
                )));
            }
        }
        Ok(Self { kind, radius })
    }

    /// The base constant `sigma` each schedule scales its increments by.
    pub fn base_sigma(&self) -> f64 {
        let r = self.radius;
        match self.kind {
            StrategyKind::Agnostic => 1.0 / (4.0 * r),
            StrategyKind::KnownPath { path_budget } => known_path_base(r, path_budget),
            StrategyKind::ObservedPath => 1.0 / (2.0 * (2.0 * r).sqrt()),
            StrategyKind::Recursive => 1.0 / (8.0 * r * r),
        }
    }
}

fn known_path_base(radius: f64, path_budget: f64) -> f64 {
    let augmented = 2.0 * radius + path_budget;
    1.0 / (2.0 * (2.0 * radius * augmented).sqrt())
}

fn optimistic_increment(base: f64, eps_t: f64, e_prev: f64, t: usize) -> f64 {
    if t <= 1 {
        base * eps_t
    } else {
        // sqrt(E_t) - sqrt(E_{t-1}), never negative since E_t >= E_{t-1}
        base * ((e_prev + eps_t * eps_t).sqrt() - e_prev.sqrt())
    }
}

/// `sigma_1 = sigma eps_1`, `sigma_t = sigma (sqrt(E_t) - sqrt(E_{t-1}))` with `sigma = 1/(4R)`.
pub fn sigma_agnostic(eps_t: f64, e_prev: f64, radius: f64, t: usize) -> f64 {
    optimistic_increment(1.0 / (4.0 * radius), eps_t, e_prev, t)
}

/// Same increments as [`sigma_agnostic`] with `sigma = 1 / (2 sqrt(2R (2R + P_T)))`.
pub fn sigma_known_path(eps_t: f64, e_prev: f64, radius: f64, path_budget: f64, t: usize) -> f64 {
    optimistic_increment(known_path_base(radius, path_budget), eps_t, e_prev, t)
}

/// `sigma_1 = sigma eps_1 / sqrt(P'_1)`,
/// `sigma_t = sigma max(0, sqrt(E_t/P'_t) - sqrt(E_{t-1}/P'_{t-1}))` with `sigma = 1/(2 sqrt(2R))`.
///
/// `ppath_t` and `ppath_prev` are augmented path lengths `P'_t = 2R + P_t`.
#[allow(clippy::too_many_arguments)]
pub fn sigma_observed_path(
    eps_t: f64,
    e_t: f64,
    e_prev: f64,
    ppath_t: f64,
    ppath_prev: f64,
    radius: f64,
    t: usize,
) -> Result<f64> {
    let base = 1.0 / (2.0 * (2.0 * radius).sqrt());
    if t <= 1 {
        if ppath_t.is_nan() || ppath_t <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "augmented path must be positive, got {ppath_t}"
            )));
        }
        return Ok(base * eps_t / ppath_t.sqrt());
    }
    if ppath_t < ppath_prev {
        return Err(Error::PathDecreased {
            previous: ppath_prev,
            current: ppath_t,
        });
    }
    if ppath_prev.is_nan() || ppath_prev <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "augmented path must be positive, got {ppath_prev}"
        )));
    }
    let now = (e_t / ppath_t).sqrt();
    let before = (e_prev / ppath_prev).sqrt();
    Ok(base * (now - before).max(0.0))
}

/// `sigma_t = delta_t / (8 R^2)`.
pub fn sigma_recursive(delta_t: f64, radius: f64) -> f64 {
    delta_t / (8.0 * radius * radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn agnostic_examples() {
        assert_relative_eq!(sigma_agnostic(1.0, 0.0, 2.0, 1), 0.125);
        assert_eq!(sigma_agnostic(0.0, 3.0, 2.0, 5), 0.0);
        assert_relative_eq!(
            sigma_agnostic(1.0, 1.0, 2.0, 2),
            (2f64.sqrt() - 1.0) / 8.0,
            epsilon = 1e-16
        );
        assert_relative_eq!(sigma_agnostic(1.0, 1.0, 2.0, 2), 0.05178, epsilon = 1e-5);
    }

    #[test]
    fn known_path_examples() {
        let cfg = StrategyConfig::new(StrategyKind::KnownPath { path_budget: 0.0 }, 2.0).unwrap();
        // P' = 2R = 4, so sigma = 1 / (2 sqrt(2 * 2 * 4)) = 1/8
        assert_relative_eq!(cfg.base_sigma(), 0.125, epsilon = 1e-16);
        assert_eq!(sigma_known_path(0.0, 2.0, 2.0, 3.0, 4), 0.0);
        assert_relative_eq!(sigma_known_path(2.0, 0.0, 2.0, 12.0, 1), 0.125, epsilon = 1e-16);
    }

    #[test]
    fn observed_path_examples() {
        assert_relative_eq!(
            sigma_observed_path(1.0, 1.0, 0.0, 4.0, 4.0, 2.0, 1).unwrap(),
            0.125,
            epsilon = 1e-16
        );
        // ratio root drops from sqrt(4/4) = 1 to sqrt(5/8) < 1
        assert_eq!(
            sigma_observed_path(1.0, 5.0, 4.0, 8.0, 4.0, 2.0, 3).unwrap(),
            0.0
        );
        assert_eq!(
            sigma_observed_path(0.0, 2.0, 2.0, 6.0, 4.0, 2.0, 3).unwrap(),
            0.0
        );
        assert!(matches!(
            sigma_observed_path(1.0, 2.0, 1.0, 4.0, 6.0, 2.0, 2),
            Err(Error::PathDecreased { .. })
        ));
    }

    #[test]
    fn recursive_examples() {
        assert_eq!(sigma_recursive(0.0, 2.0), 0.0);
        assert_eq!(sigma_recursive(2.0, 2.0), 1.0 / 16.0);
        assert_eq!(sigma_recursive(3.0, 1.0), 3.0 / 8.0);
    }

    #[test]
    fn base_constants() {
        let r = 2.0;
        let mk = |k| StrategyConfig::new(k, r).unwrap().base_sigma();
        assert_eq!(mk(StrategyKind::Agnostic), 0.125);
        assert_relative_eq!(
            mk(StrategyKind::KnownPath { path_budget: 12.0 }),
            1.0 / 16.0,
            epsilon = 1e-16
        );
        assert_relative_eq!(mk(StrategyKind::ObservedPath), 0.25, epsilon = 1e-16);
        assert_eq!(mk(StrategyKind::Recursive), 1.0 / 32.0);
    }

    #[test]
    fn invalid_configs() {
        assert!(StrategyConfig::new(StrategyKind::Agnostic, 0.0).is_err());
        assert!(StrategyConfig::new(StrategyKind::KnownPath { path_budget: -1.0 }, 1.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for n in StrategyName::ALL {
            assert_eq!(n.as_str().parse::<StrategyName>().unwrap(), n);
        }
        assert!("lazy".parse::<StrategyName>().is_err());
    }
}
