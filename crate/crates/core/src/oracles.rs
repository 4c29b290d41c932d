//! First-order oracles for per-slot costs and their predictions.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist, dot, norm, norm_sq, sub};

/// A convex function exposed through value and subgradient queries.
///
/// Subgradient selection at kinks must be deterministic so that runs are
/// reproducible.
pub trait ConvexFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Modulus of strong convexity w.r.t. the Euclidean norm (0 if merely convex).
    fn strong_convexity(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone)]
pub enum OracleForm {
    Linear(Vec<f64>),
    General(Arc<dyn ConvexFunction>),
}

/// A per-slot loss `f_t` (or its prediction), optionally with a declared
/// Lipschitz constant that every reported subgradient must respect.
#[derive(Debug, Clone)]
pub struct Oracle {
    form: OracleForm,
    lipschitz: Option<f64>,
}

pub type CostSpec = Oracle;
pub type PredictionSpec = Oracle;

impl Oracle {
    pub fn linear(coefficients: Vec<f64>) -> Self {
        Self {
            form: OracleForm::Linear(coefficients),
            lipschitz: None,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::linear(vec![0.0; dim])
    }

    pub fn general(f: Arc<dyn ConvexFunction>) -> Self {
        Self {
            form: OracleForm::General(f),
            lipschitz: None,
        }
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    pub fn form(&self) -> &OracleForm {
        &self.form
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn dim(&self) -> usize {
        match &self.form {
            OracleForm::Linear(c) => c.len(),
            OracleForm::General(f) => f.dim(),
        }
    }

    /// Coefficient vector of a linear oracle.
    pub fn as_linear(&self) -> Option<&[f64]> {
        match &self.form {
            OracleForm::Linear(c) => Some(c),
            OracleForm::General(_) => None,
        }
    }

    pub fn strong_convexity(&self) -> f64 {
        match &self.form {
            OracleForm::Linear(_) => 0.0,
            OracleForm::General(f) => f.strong_convexity(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        match &self.form {
            OracleForm::Linear(c) => Ok(dot(c, x)),
            OracleForm::General(f) => f.value(x),
        }
    }

    pub fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let g = match &self.form {
            OracleForm::Linear(c) => c.clone(),
            OracleForm::General(f) => f.subgradient(x)?,
        };
        check_dim(self.dim(), g.len())?;
        if let Some(l) = self.lipschitz {
            let n = norm(&g);
            if n > l * (1.0 + 1e-12) {
                return Err(Error::LipschitzViolation { norm: n, lipschitz: l });
            }
        }
        Ok(g)
    }
}

/// `|g - g_pred|`
pub fn prediction_error(g: &[f64], g_pred: &[f64]) -> Result<f64> {
    check_dim(g.len(), g_pred.len())?;
    Ok(dist(g, g_pred))
}

/// `(weight/2) |x - center|^2`
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub center: Vec<f64>,
    pub weight: f64,
}

impl SquaredDistance {
    pub fn new(center: Vec<f64>, weight: f64) -> Self {
        Self { center, weight }
    }
}

impl ConvexFunction for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(0.5 * self.weight * norm_sq(&sub(x, &self.center)))
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(x.iter()
            .zip(&self.center)
            .map(|(a, b)| self.weight * (a - b))
            .collect())
    }

    fn strong_convexity(&self) -> f64 {
        self.weight
    }
}

/// `weight * sum_i |x_i - center_i|`, with subgradient 0 on kinks (the
/// midpoint of `[-weight, weight]`).
#[derive(Debug, Clone)]
pub struct AbsoluteDeviation {
    pub center: Vec<f64>,
    pub weight: f64,
}

impl AbsoluteDeviation {
    pub fn new(center: Vec<f64>, weight: f64) -> Self {
        Self { center, weight }
    }
}

impl ConvexFunction for AbsoluteDeviation {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.weight
            * x.iter()
                .zip(&self.center)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(x.iter()
            .zip(&self.center)
            .map(|(a, b)| {
                let d = a - b;
                if d > 0.0 {
                    self.weight
                } else if d < 0.0 {
                    -self.weight
                } else {
                    0.0
                }
            })
            .collect())
    }
}

/// Sum of a linear term and a general convex function: `<c, x> + f(x)`.
#[derive(Debug, Clone)]
pub struct Tilted {
    pub linear: Vec<f64>,
    pub inner: Arc<dyn ConvexFunction>,
}

impl ConvexFunction for Tilted {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(dot(&self.linear, x) + self.inner.value(x)?)
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.inner.subgradient(x)?;
        Ok(g.iter().zip(&self.linear).map(|(a, b)| a + b).collect())
    }

    fn strong_convexity(&self) -> f64 {
        self.inner.strong_convexity()
    }
}
