//! Brute-force minimization of the per-slot objective over a dense grid,
//! used to cross-check the learner's closed-form and solver-based iterates
//! in one and two dimensions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{dot, norm_sq};
use crate::oracles::Oracle;

/// `<p, x> + (sigma/2)|x|^2 + f~(x)`
#[derive(Debug, Clone)]
pub struct SlotObjective {
    pub p_cum: Vec<f64>,
    pub sigma_cum: f64,
    pub prediction: Oracle,
}

impl SlotObjective {
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(&self.p_cum, x) + 0.5 * self.sigma_cum * norm_sq(x) + self.prediction.evaluate(x)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Number of feasible grid points inspected.
    pub points: usize,
}

type Best = Option<(f64, usize, Vec<f64>)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => {
            // ties resolve to the lower grid index
            if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}

/// Minimizes the objective over the points `h * (i_1, .., i_d)` of the
/// set's bounding box that belong to the set.
pub fn grid_minimum(
    objective: &SlotObjective,
    set: &FeasibleSet,
    resolution: f64,
) -> Result<GridMinimum> {
    let d = set.dim();
    if d > 2 {
        return Err(Error::InvalidParameter(format!(
            "grid search supports at most 2 dimensions, got {d}"
        )));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid resolution must be positive, got {resolution}"
        )));
    }
    if objective.p_cum.len() != d || objective.prediction.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: objective.p_cum.len(),
        });
    }
    let half = set.bounding_half_widths();
    let counts: Vec<i64> = half
        .iter()
        .map(|h| (h / resolution + 1e-9).floor() as i64)
        .collect();
    let coord = |i: i64| i as f64 * resolution;
    let (inner, width) = if d == 2 {
        (counts[1], 2 * counts[1] + 1)
    } else {
        (0, 1)
    };

    let row = |i: i64| -> Result<(usize, Best)> {
        let mut best: Best = None;
        let mut feasible = 0;
        for j in -inner..=inner {
            let x: Vec<f64> = if d == 2 {
                vec![coord(i), coord(j)]
            } else {
                vec![coord(i)]
            };
            if !set.contains(&x)? {
                continue;
            }
            feasible += 1;
            let v = objective.value(&x)?;
            let index = ((i + counts[0]) * width + j + inner) as usize;
            best = better(best, Some((v, index, x)));
        }
        Ok((feasible, best))
    };

    let rows: Vec<Result<(usize, Best)>> = (-counts[0]..=counts[0]).into_par_iter().map(row).collect();
    let mut total = 0;
    let mut best: Best = None;
    for r in rows {
        let (n, b) = r?;
        total += n;
        best = better(best, b);
    }
    if total < 10 {
        return Err(Error::ResolutionTooCoarse {
            resolution,
            points: total,
        });
    }
    let (value, _, point) = best.expect("at least ten feasible points");
    Ok(GridMinimum {
        point,
        value,
        points: total,
    })
}

/// Minimizing grid point of the objective.
pub fn grid_argmin_oracle(
    objective: &SlotObjective,
    set: &FeasibleSet,
    resolution: f64,
) -> Result<Vec<f64>> {
    Ok(grid_minimum(objective, set, resolution)?.point)
}
