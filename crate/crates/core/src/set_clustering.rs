//! Constrained set clustering: targets are convex sets `Λ_i` and the distance
//! from a center to a target is the squared set distance.
//!
//! DC split: `g = ((m + τq)/2)‖X‖²_F`,
//! `h₁ = Σ_i (½ Σ_ℓ φ_{Λ_i}(x^ℓ) + ½ max_r Σ_{ℓ≠r} dist(x^ℓ, Λ_i)²)`,
//! `h₂ = (τ/2) Σ_ℓ Σ_j φ_{Ω_j^ℓ}(x^ℓ)`.

use crate::clustering::argmin;
use crate::constraints::ConstraintSystem;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::sets::ConvexSet;
use crate::solver::{DcProblem, Dims};

#[derive(Clone, Debug)]
pub struct SetClusteringProblem<T> {
    targets: Vec<ConvexSet<T>>,
    constraints: ConstraintSystem<T>,
}

impl<T: Scalar> SetClusteringProblem<T> {
    pub fn new(targets: Vec<ConvexSet<T>>, constraints: ConstraintSystem<T>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one target set".into(),
            ));
        }
        if let Some(t) = targets.iter().find(|t| t.dim() != constraints.dim()) {
            return Err(Error::DimensionMismatch {
                expected: constraints.dim(),
                found: t.dim(),
            });
        }
        Ok(Self {
            targets,
            constraints,
        })
    }

    pub fn targets(&self) -> &[ConvexSet<T>] {
        &self.targets
    }

    pub fn constraints(&self) -> &ConstraintSystem<T> {
        &self.constraints
    }

    fn check(&self, x: &Mat<T>) -> Result<()> {
        let expected = (self.constraints.k(), self.constraints.dim());
        if x.shape() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: x.shape(),
            });
        }
        Ok(())
    }

    pub fn assignments(&self, x: &Mat<T>) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self
            .targets
            .iter()
            .map(|t| argmin(x.row_iter().map(|c| t.dist_sq_unchecked(c))).0)
            .collect())
    }

    fn min_dist_sum(&self, x: &Mat<T>) -> T {
        self.targets
            .iter()
            .map(|t| argmin(x.row_iter().map(|c| t.dist_sq_unchecked(c))).1)
            .sum()
    }

    /// `ψ(X) = Σ_i min_ℓ dist(x^ℓ, Λ_i)²`
    pub fn eval_cost(&self, x: &Mat<T>) -> Result<T> {
        self.check(x)?;
        Ok(self.min_dist_sum(x))
    }

    pub fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T> {
        self.check(x)?;
        let half = T::lit(0.5);
        Ok(half * self.min_dist_sum(x) + half * tau * self.constraints.penalty(x))
    }

    pub fn eval_g_h(&self, x: &Mat<T>, tau: T) -> Result<(T, T)> {
        self.check(x)?;
        let half = T::lit(0.5);
        let g = half * self.g_modulus(tau) * x.frobenius_sq();
        let mut h1 = T::zero();
        for t in &self.targets {
            let mut phi = T::zero();
            let mut total = T::zero();
            let mut smallest = T::infinity();
            for c in x.row_iter() {
                phi += t.phi_unchecked(c);
                let dsq = t.dist_sq_unchecked(c);
                total += dsq;
                smallest = smallest.min(dsq);
            }
            h1 += half * phi + half * (total - smallest);
        }
        let h = h1 + half * tau * self.constraints.phi_sum(x);
        Ok((g, h))
    }

    /// `∇g(X) = (m + τq) X`
    pub fn grad_g(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        let mut out = x.clone();
        out.scale(self.g_modulus(tau));
        Ok(out)
    }

    /// `Σ_i e_{r(i)} (x^{r(i)} − P(x^{r(i)}; Λ_i))`
    fn assignment_residual(&self, x: &Mat<T>) -> Mat<T> {
        let mut acc = Mat::zeros(x.rows(), x.cols());
        let mut w = vec![T::zero(); x.cols()];
        for t in &self.targets {
            let (r, _) = argmin(x.row_iter().map(|c| t.dist_sq_unchecked(c)));
            let xr = x.row(r);
            t.project_into(xr, &mut w);
            for ((s, &xv), &wv) in acc.row_mut(r).iter_mut().zip(xr).zip(&w) {
                *s += xv - wv;
            }
        }
        acc
    }

    /// `V + τU ∈ ∂h(X)` with `V = mX − Σ_i e_{r(i)}(x^{r(i)} − P(x^{r(i)}; Λ_i))`.
    pub fn h_subgradient(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        let m = T::from_count(self.targets.len());
        let resid = self.assignment_residual(x);
        let u = self.constraints.projection_sum(x);
        let mut y = Mat::zeros(x.rows(), x.cols());
        for l in 0..x.rows() {
            let (xr, rr, ur) = (x.row(l), resid.row(l), u.row(l));
            for (j, o) in y.row_mut(l).iter_mut().enumerate() {
                *o = m * xr[j] - rr[j] + tau * ur[j];
            }
        }
        Ok(y)
    }

    /// `(mX + τU − Σ_i e_{r(i)}(x^{r(i)} − w_i^{r(i)})) / (τq + m)`, `w_i^ℓ = P(x^ℓ; Λ_i)`.
    pub fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        if !(tau > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        let m = T::from_count(self.targets.len());
        let resid = self.assignment_residual(x);
        let mut out = self.constraints.projection_sum(x);
        let inv = T::one() / self.g_modulus(tau);
        for l in 0..x.rows() {
            let (xr, rr) = (x.row(l), resid.row(l));
            for (j, o) in out.row_mut(l).iter_mut().enumerate() {
                *o = (m * xr[j] + tau * *o - rr[j]) * inv;
            }
        }
        Ok(out)
    }
}

impl<T: Scalar> DcProblem<T> for SetClusteringProblem<T> {
    fn dims(&self) -> Dims {
        Dims {
            m: self.targets.len(),
            k: self.constraints.k(),
            d: self.constraints.dim(),
            q: self.constraints.q(),
        }
    }

    fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T> {
        SetClusteringProblem::eval_penalized(self, x, tau)
    }

    fn eval_cost(&self, x: &Mat<T>) -> Result<T> {
        SetClusteringProblem::eval_cost(self, x)
    }

    fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        SetClusteringProblem::dca_point(self, x, tau)
    }
}
