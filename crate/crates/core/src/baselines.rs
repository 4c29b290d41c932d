//! Comparison learners: adaptive lazy-projection FTRL, adaptive greedy OGD,
//! and their optimistic versions.
//!
//! The constants follow the usual diameter-tuned AdaGrad recipes and can be
//! overridden through [`BaselineTuning`].

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::geometry::FeasibleSet;
use crate::linalg::{add, axpy, norm, norm_sq, scale, sub};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    FtrlAdaptive,
    OgdAdaptive,
    OptimisticFtrl,
    OptimisticOgd,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 4] = [
        BaselineKind::FtrlAdaptive,
        BaselineKind::OgdAdaptive,
        BaselineKind::OptimisticFtrl,
        BaselineKind::OptimisticOgd,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineKind::FtrlAdaptive => "ftrl",
            BaselineKind::OgdAdaptive => "ogd",
            BaselineKind::OptimisticFtrl => "opt-ftrl",
            BaselineKind::OptimisticOgd => "opt-ogd",
        }
    }

    pub fn is_optimistic(&self) -> bool {
        matches!(self, BaselineKind::OptimisticFtrl | BaselineKind::OptimisticOgd)
    }

    pub fn is_ftrl(&self) -> bool {
        matches!(self, BaselineKind::FtrlAdaptive | BaselineKind::OptimisticFtrl)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown baseline '{s}'")))
    }
}

/// `sigma_{1:t} = (ftrl_coefficient / R) sqrt(G_t)` and
/// `eta_t = ogd_coefficient R / sqrt(G_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineTuning {
    pub ftrl_coefficient: f64,
    pub ogd_coefficient: f64,
}

impl Default for BaselineTuning {
    fn default() -> Self {
        Self {
            ftrl_coefficient: std::f64::consts::SQRT_2 / 2.0,
            ogd_coefficient: std::f64::consts::SQRT_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub kind: BaselineKind,
    pub tuning: BaselineTuning,
    /// Gradient sum (FTRL kinds only).
    pub g_cum: Vec<f64>,
    /// `sum |g|^2`, or `sum eps^2` for the optimistic kinds.
    pub grad_energy: f64,
    pub x_current: Vec<f64>,
    /// Index of the upcoming slot (1-based).
    pub t: usize,
    /// `sigma_{1:t}` for FTRL kinds, `1/eta_t` for OGD kinds (0 before any energy).
    pub regularization: f64,
}

impl BaselineState {
    /// Plain kinds start at the origin; optimistic kinds at the minimizer of
    /// the first predicted linear loss.
    pub fn new(
        kind: BaselineKind,
        set: &FeasibleSet,
        tuning: BaselineTuning,
        first_prediction: Option<&[f64]>,
    ) -> Result<Self> {
        let d = set.dim();
        let x_current = match (kind.is_optimistic(), first_prediction) {
            (true, Some(g)) => set.linear_argmin(g)?,
            (true, None) => {
                return Err(Error::InvalidParameter(format!(
                    "{kind} needs the first prediction"
                )))
            }
            (false, _) => set.project(&vec![0.0; d])?,
        };
        Ok(Self {
            kind,
            tuning,
            g_cum: vec![0.0; d],
            grad_energy: 0.0,
            x_current,
            t: 1,
            regularization: 0.0,
        })
    }

    fn expect_kind(&self, kind: BaselineKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameter(format!(
                "{} step called on a {} state",
                kind, self.kind
            )));
        }
        Ok(())
    }

    fn ftrl_sigma(&self, radius: f64) -> f64 {
        self.tuning.ftrl_coefficient / radius * self.grad_energy.sqrt()
    }

    fn ogd_eta(&self, radius: f64) -> f64 {
        self.tuning.ogd_coefficient * radius / self.grad_energy.sqrt()
    }

    fn finish(&mut self, x: Vec<f64>) -> Vec<f64> {
        self.x_current = x.clone();
        self.t += 1;
        x
    }

    pub fn ftrl_adaptive_step(&mut self, g: &[f64], set: &FeasibleSet) -> Result<Vec<f64>> {
        self.expect_kind(BaselineKind::FtrlAdaptive)?;
        check_dim(set.dim(), g.len())?;
        self.g_cum = add(&self.g_cum, g);
        self.grad_energy += norm_sq(g);
        let x = if self.grad_energy == 0.0 {
            set.project(&vec![0.0; g.len()])?
        } else {
            let sigma = self.ftrl_sigma(set.radius());
            self.regularization = sigma;
            set.project(&scale(&self.g_cum, -1.0 / sigma))?
        };
        Ok(self.finish(x))
    }

    pub fn ogd_adaptive_step(&mut self, g: &[f64], set: &FeasibleSet) -> Result<Vec<f64>> {
        self.expect_kind(BaselineKind::OgdAdaptive)?;
        check_dim(set.dim(), g.len())?;
        self.grad_energy += norm_sq(g);
        let x = if self.grad_energy == 0.0 {
            self.x_current.clone()
        } else {
            let eta = self.ogd_eta(set.radius());
            self.regularization = 1.0 / eta;
            set.project(&axpy(&self.x_current, -eta, g))?
        };
        Ok(self.finish(x))
    }

    /// `g_pred_t` is the prediction the current iterate was built from; it
    /// only enters the error energy.
    pub fn optimistic_ftrl_step(
        &mut self,
        g: &[f64],
        g_pred_t: &[f64],
        g_pred_next: &[f64],
        set: &FeasibleSet,
    ) -> Result<Vec<f64>> {
        self.expect_kind(BaselineKind::OptimisticFtrl)?;
        check_dim(set.dim(), g.len())?;
        check_dim(set.dim(), g_pred_t.len())?;
        check_dim(set.dim(), g_pred_next.len())?;
        self.g_cum = add(&self.g_cum, g);
        self.grad_energy += norm_sq(&sub(g, g_pred_t));
        let x = if self.grad_energy == 0.0 {
            set.linear_argmin(g_pred_next)?
        } else {
            let sigma = self.ftrl_sigma(set.radius());
            self.regularization = sigma;
            set.project(&scale(&add(&self.g_cum, g_pred_next), -1.0 / sigma))?
        };
        Ok(self.finish(x))
    }

    /// One-step optimistic gradient step along `g_t - g~_t + g~_{t+1}`.
    pub fn optimistic_ogd_step(
        &mut self,
        g: &[f64],
        g_pred_t: &[f64],
        g_pred_next: &[f64],
        set: &FeasibleSet,
    ) -> Result<Vec<f64>> {
        self.expect_kind(BaselineKind::OptimisticOgd)?;
        check_dim(set.dim(), g.len())?;
        check_dim(set.dim(), g_pred_t.len())?;
        check_dim(set.dim(), g_pred_next.len())?;
        let err = sub(g, g_pred_t);
        self.grad_energy += norm_sq(&err);
        let x = if self.grad_energy == 0.0 {
            self.x_current.clone()
        } else {
            let eta = self.ogd_eta(set.radius());
            self.regularization = 1.0 / eta;
            set.project(&axpy(&self.x_current, -eta, &add(&err, g_pred_next)))?
        };
        Ok(self.finish(x))
    }

    /// Dispatches on the kind; the plain kinds ignore the predictions.
    pub fn step(
        &mut self,
        g: &[f64],
        g_pred_t: &[f64],
        g_pred_next: &[f64],
        set: &FeasibleSet,
    ) -> Result<Vec<f64>> {
        match self.kind {
            BaselineKind::FtrlAdaptive => self.ftrl_adaptive_step(g, set),
            BaselineKind::OgdAdaptive => self.ogd_adaptive_step(g, set),
            BaselineKind::OptimisticFtrl => self.optimistic_ftrl_step(g, g_pred_t, g_pred_next, set),
            BaselineKind::OptimisticOgd => self.optimistic_ogd_step(g, g_pred_t, g_pred_next, set),
        }
    }

    /// `|g_cum|` for FTRL kinds, `|x|` for OGD kinds.
    pub fn state_norm(&self) -> f64 {
        if self.kind.is_ftrl() {
            norm(&self.g_cum)
        } else {
            norm(&self.x_current)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interval() -> FeasibleSet {
        FeasibleSet::ball(1, 2.0).unwrap()
    }

    fn state(kind: BaselineKind, set: &FeasibleSet) -> BaselineState {
        let zero = vec![0.0; set.dim()];
        BaselineState::new(kind, set, BaselineTuning::default(), Some(&zero)).unwrap()
    }

    #[test]
    fn ftrl_examples() {
        let set = interval();
        let mut s = state(BaselineKind::FtrlAdaptive, &set);
        assert_eq!(s.ftrl_adaptive_step(&[0.0], &set).unwrap(), vec![0.0]);
        assert_eq!(s.ftrl_adaptive_step(&[0.0], &set).unwrap(), vec![0.0]);
        let mut s = state(BaselineKind::FtrlAdaptive, &set);
        assert_eq!(s.ftrl_adaptive_step(&[1.0], &set).unwrap(), vec![-2.0]);
        assert_relative_eq!(s.regularization, 2f64.sqrt() / 4.0, epsilon = 1e-16);
    }

    #[test]
    fn ftrl_stays_trapped_after_switch() {
        let set = interval();
        let mut s = state(BaselineKind::FtrlAdaptive, &set);
        for _ in 0..1000 {
            s.ftrl_adaptive_step(&[-1.0], &set).unwrap();
        }
        let mut stuck = 0;
        for _ in 0..1000 {
            let x = s.ftrl_adaptive_step(&[1.0], &set).unwrap();
            if x[0] >= 2.0 - 1e-12 {
                stuck += 1;
            } else {
                break;
            }
        }
        assert!(stuck >= 900, "left the stale extreme after {stuck} slots");
        let mut s = state(BaselineKind::FtrlAdaptive, &set);
        for t in 0..1500 {
            let g = if t < 1000 { -1.0 } else { 1.0 };
            s.ftrl_adaptive_step(&[g], &set).unwrap();
        }
        assert_relative_eq!(s.x_current[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ogd_examples() {
        let set = interval();
        let mut s = state(BaselineKind::OgdAdaptive, &set);
        assert_eq!(s.ogd_adaptive_step(&[0.0], &set).unwrap(), vec![0.0]);
        assert_eq!(s.ogd_adaptive_step(&[1.0], &set).unwrap(), vec![-2.0]);
        let x3 = s.ogd_adaptive_step(&[-1.0], &set).unwrap();
        // eta_2 = 2 sqrt2 / sqrt2 = 2
        assert_relative_eq!(x3[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn optimistic_ftrl_examples() {
        let set = interval();
        let mut s = state(BaselineKind::OptimisticFtrl, &set);
        s.g_cum = vec![-4.0];
        // choose energy so that sigma = 1 after adding eps^2 = 0
        s.grad_energy = 8.0;
        let x = s.optimistic_ftrl_step(&[1.0], &[1.0], &[1.0], &set).unwrap();
        assert_relative_eq!(s.regularization, 1.0, epsilon = 1e-15);
        assert_relative_eq!(x[0], 2.0, epsilon = 1e-12);
        // perfect predictions keep energy at zero and track the next minimizer
        let mut s = state(BaselineKind::OptimisticFtrl, &set);
        assert_eq!(s.optimistic_ftrl_step(&[0.0], &[0.0], &[3.0], &set).unwrap(), vec![-2.0]);
        assert_eq!(s.optimistic_ftrl_step(&[3.0], &[3.0], &[-1.0], &set).unwrap(), vec![2.0]);
        assert_eq!(s.grad_energy, 0.0);
    }

    #[test]
    fn optimistic_ogd_example() {
        let set = interval();
        let mut s = state(BaselineKind::OptimisticOgd, &set);
        // eta = sqrt2 * 2 / sqrt(G) = 1  <=>  G = 8
        s.grad_energy = 8.0;
        let x = s.optimistic_ogd_step(&[1.0], &[1.0], &[-1.0], &set).unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_predictions_reproduce_plain_kinds() {
        let set = FeasibleSet::ball(3, 1.5).unwrap();
        let zero = vec![0.0; 3];
        let gs: Vec<Vec<f64>> = (0..60)
            .map(|t| {
                let a = t as f64 * 0.37;
                vec![a.sin(), (2.0 * a).cos(), if t % 7 == 0 { 0.0 } else { -0.5 }]
            })
            .collect();
        for (plain, opt) in [
            (BaselineKind::FtrlAdaptive, BaselineKind::OptimisticFtrl),
            (BaselineKind::OgdAdaptive, BaselineKind::OptimisticOgd),
        ] {
            let mut a = state(plain, &set);
            let mut b = state(opt, &set);
            for g in &gs {
                let xa = a.step(g, &zero, &zero, &set).unwrap();
                let xb = b.step(g, &zero, &zero, &set).unwrap();
                assert_eq!(xa, xb);
                assert!(set.contains(&xa).unwrap());
            }
            assert_eq!(a.grad_energy, b.grad_energy);
        }
    }

    #[test]
    fn kind_checks_and_names() {
        let set = interval();
        let mut s = state(BaselineKind::OgdAdaptive, &set);
        assert!(s.ftrl_adaptive_step(&[1.0], &set).is_err());
        assert!(s.ogd_adaptive_step(&[1.0, 2.0], &set).is_err());
        for k in BaselineKind::ALL {
            assert_eq!(k.as_str().parse::<BaselineKind>().unwrap(), k);
        }
        assert!(BaselineState::new(
            BaselineKind::OptimisticOgd,
            &set,
            BaselineTuning::default(),
            None
        )
        .is_err());
    }
}
