//! Compact convex feasible sets.
//!
//! Only two shapes are supported: the centered Euclidean ball and the
//! centered axis-aligned box. Both admit closed forms for projection, for
//! the minimizer of a linear function and for the minimizer of a linear
//! function plus an isotropic quadratic, which is everything the learners
//! need.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm};

/// Default slack of the membership test. Points produced by [`FeasibleSet::project`]
/// may sit a rounding error outside the boundary and must still count as members.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { radius: f64, dim: usize },
    Box { half_widths: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    shape: Shape,
    tolerance: f64,
}

impl FeasibleSet {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Self {
            shape: Shape::Ball { radius, dim },
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn axis_box(half_widths: Vec<f64>) -> Result<Self> {
        if half_widths.is_empty() {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if let Some(h) = half_widths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "box half-widths must be positive and finite, got {h}"
            )));
        }
        Ok(Self {
            shape: Shape::Box { half_widths },
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Replaces the boundary slack of [`contains`](Self::contains).
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance.max(0.0);
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Ball { dim, .. } => *dim,
            Shape::Box { half_widths } => half_widths.len(),
        }
    }

    /// Radius `R` of the smallest centered ball containing the set.
    pub fn radius(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => *radius,
            Shape::Box { half_widths } => norm(half_widths),
        }
    }

    /// Per-coordinate half-widths of the bounding box.
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { radius, dim } => vec![*radius; *dim],
            Shape::Box { half_widths } => half_widths.clone(),
        }
    }

    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), y.len())?;
        Ok(match &self.shape {
            Shape::Ball { radius, .. } => {
                let n = norm(y);
                if n <= radius + self.tolerance {
                    y.to_vec()
                } else {
                    let s = radius / n;
                    y.iter().map(|v| v * s).collect()
                }
            }
            Shape::Box { half_widths } => y
                .iter()
                .zip(half_widths)
                .map(|(v, h)| v.clamp(-h, *h))
                .collect(),
        })
    }

    pub fn contains(&self, y: &[f64]) -> Result<bool> {
        check_dim(self.dim(), y.len())?;
        Ok(match &self.shape {
            Shape::Ball { radius, .. } => norm(y) <= radius + self.tolerance,
            Shape::Box { half_widths } => y
                .iter()
                .zip(half_widths)
                .all(|(v, h)| v.abs() <= h + self.tolerance),
        })
    }

    /// A minimizer of `<c, x>` over the set. Zero coefficients resolve to the
    /// origin (coordinate-wise for the box).
    pub fn linear_argmin(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), c.len())?;
        Ok(match &self.shape {
            Shape::Ball { radius, .. } => {
                let n = norm(c);
                if n == 0.0 {
                    vec![0.0; c.len()]
                } else {
                    c.iter().map(|v| -radius * v / n).collect()
                }
            }
            Shape::Box { half_widths } => c
                .iter()
                .zip(half_widths)
                .map(|(v, h)| {
                    if *v > 0.0 {
                        -h
                    } else if *v < 0.0 {
                        *h
                    } else {
                        0.0
                    }
                })
                .collect(),
        })
    }

    /// Minimizer of `<c, x> + (s/2)|x|^2` over the set.
    pub fn linear_quadratic_argmin(&self, c: &[f64], s: f64) -> Result<Vec<f64>> {
        check_dim(self.dim(), c.len())?;
        if s.is_nan() || s < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "quadratic weight must be non-negative, got {s}"
            )));
        }
        if s == 0.0 {
            return self.linear_argmin(c);
        }
        let unconstrained: Vec<f64> = c.iter().map(|v| -v / s).collect();
        self.project(&unconstrained)
    }

    /// Support function `max_{y in X} <g, y>`.
    pub fn support(&self, g: &[f64]) -> Result<f64> {
        check_dim(self.dim(), g.len())?;
        Ok(match &self.shape {
            Shape::Ball { radius, .. } => radius * norm(g),
            Shape::Box { half_widths } => g.iter().zip(half_widths).map(|(v, h)| v.abs() * h).sum(),
        })
    }

    /// `max_{y in X} <g, y - x>`; non-positive iff `g` lies in the normal cone at `x`.
    pub fn normal_cone_gap(&self, g: &[f64], x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.support(g)? - dot(g, x))
    }

    /// Draws a random member of the set (uniform for the box, uniform in
    /// volume for the ball).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { radius, dim } => {
                let dir: Vec<f64> = (0..*dim).map(|_| StandardNormal.sample(rng)).collect();
                let n = norm(&dir).max(f64::MIN_POSITIVE);
                let r = radius * rng.gen::<f64>().powf(1.0 / *dim as f64);
                dir.iter().map(|v| v * r / n).collect()
            }
            Shape::Box { half_widths } => half_widths
                .iter()
                .map(|h| rng.gen_range(-*h..=*h))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ball2() -> FeasibleSet {
        FeasibleSet::ball(2, 2.0).unwrap()
    }

    #[test]
    fn project_examples() {
        let b = FeasibleSet::ball(4, 2.0).unwrap();
        assert_eq!(b.project(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let p = ball2().project(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(p[0], 1.2, epsilon = 1e-15);
        assert_relative_eq!(p[1], 1.6, epsilon = 1e-15);
        let bx = FeasibleSet::axis_box(vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.project(&[2.0, -3.0]).unwrap(), vec![1.0, -1.0]);
    }

    #[test]
    fn contains_examples() {
        let b = ball2();
        assert!(b.contains(&[1.0, 0.0]).unwrap());
        assert!(b.contains(&[0.0, 2.0]).unwrap());
        assert!(!b.contains(&[2.0 + 1e-6, 0.0]).unwrap());
        let s = 2f64.sqrt();
        assert!(b.contains(&[s, s]).unwrap());
    }

    #[test]
    fn linear_argmin_examples() {
        let b = ball2();
        assert_eq!(b.linear_argmin(&[1.0, 0.0]).unwrap(), vec![-2.0, 0.0]);
        assert_eq!(b.linear_argmin(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let b16 = FeasibleSet::ball(16, 2.0).unwrap();
        let x = b16.linear_argmin(&[1.0; 16]).unwrap();
        assert!(x.iter().all(|v| *v == -0.5));
        let bx = FeasibleSet::axis_box(vec![1.0, 3.0, 2.0]).unwrap();
        assert_eq!(bx.linear_argmin(&[2.0, -1.0, 0.0]).unwrap(), vec![-1.0, 3.0, 0.0]);
    }

    #[test]
    fn linear_quadratic_argmin_examples() {
        let b = ball2();
        assert_eq!(b.linear_quadratic_argmin(&[1.0, 0.0], 1.0).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(b.linear_quadratic_argmin(&[6.0, 0.0], 1.0).unwrap(), vec![-2.0, 0.0]);
        assert_eq!(b.linear_quadratic_argmin(&[1.0, 0.0], 0.0).unwrap(), vec![-2.0, 0.0]);
        let bx = FeasibleSet::axis_box(vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.linear_quadratic_argmin(&[0.5, -4.0], 1.0).unwrap(), vec![-0.5, 1.0]);
        assert!(b.linear_quadratic_argmin(&[1.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = ball2();
        assert!(matches!(
            b.project(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(b.contains(&[1.0, 2.0, 3.0]).is_err());
        assert!(b.linear_argmin(&[]).is_err());
        assert!(b.linear_quadratic_argmin(&[1.0], 1.0).is_err());
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(FeasibleSet::ball(0, 1.0).is_err());
        assert!(FeasibleSet::ball(2, 0.0).is_err());
        assert!(FeasibleSet::ball(2, f64::NAN).is_err());
        assert!(FeasibleSet::axis_box(vec![]).is_err());
        assert!(FeasibleSet::axis_box(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn box_radius_is_circumscribed() {
        let bx = FeasibleSet::axis_box(vec![3.0, 4.0]).unwrap();
        assert_eq!(bx.radius(), 5.0);
    }

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for set in [
            FeasibleSet::ball(3, 1.5).unwrap(),
            FeasibleSet::axis_box(vec![0.5, 2.0]).unwrap(),
        ] {
            for _ in 0..200 {
                let y = set.sample(&mut rng);
                assert!(set.contains(&y).unwrap());
            }
        }
    }

    #[test]
    fn normal_cone_gap_matches_sampling() {
        let b = ball2();
        let x = vec![-2.0, 0.0];
        // outward normal at x
        assert!(b.normal_cone_gap(&[-3.0, 0.0], &x).unwrap().abs() < 1e-15);
        assert!(b.normal_cone_gap(&[-3.0, 0.1], &x).unwrap() > 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let y = b.sample(&mut rng);
            assert!(-3.0 * (y[0] - x[0]) <= 1e-12);
        }
    }
}
