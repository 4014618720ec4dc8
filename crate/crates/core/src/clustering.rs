//! Constrained point clustering.
//!
//! Penalized objective
//!
//! ```text
//! f(X) = ½ Σ_i min_ℓ ‖x^ℓ − a^i‖² + (τ/2) Σ_ℓ Σ_j dist(x^ℓ, Ω_j^ℓ)²
//! ```
//!
//! split as `g = g₁ + g₂`, `h = h₁ + h₂` with
//! `g₁ = ½ Σ_i Σ_ℓ ‖x^ℓ − a^i‖²`, `g₂ = (τq/2)‖X‖²_F`,
//! `h₁ = ½ Σ_i max_r Σ_{ℓ≠r} ‖x^ℓ − a^i‖²`, `h₂ = (τ/2) Σ_ℓ Σ_j φ_{Ω_j^ℓ}(x^ℓ)`.

use crate::constraints::ConstraintSystem;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{self, Scalar};
use crate::solver::{DcProblem, Dims};

#[derive(Clone, Debug)]
pub struct ClusteringProblem<T> {
    data: Mat<T>,
    constraints: ConstraintSystem<T>,
    /// `Σ_i a^i`, i.e. every row of `E·A`.
    data_sum: Vec<T>,
}

/// First index attaining the minimum.
pub(crate) fn argmin<T: Scalar>(values: impl Iterator<Item = T>) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, v) in values.enumerate() {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

impl<T: Scalar> ClusteringProblem<T> {
    pub fn new(data: Mat<T>, constraints: ConstraintSystem<T>) -> Result<Self> {
        if data.rows() == 0 {
            return Err(Error::InvalidParameter("data matrix has no rows".into()));
        }
        if data.cols() != constraints.dim() {
            return Err(Error::DimensionMismatch {
                expected: constraints.dim(),
                found: data.cols(),
            });
        }
        if !data.is_finite() {
            return Err(Error::InvalidParameter(
                "data matrix contains non-finite entries".into(),
            ));
        }
        let mut data_sum = vec![T::zero(); data.cols()];
        for row in data.row_iter() {
            for (s, &v) in data_sum.iter_mut().zip(row) {
                *s += v;
            }
        }
        Ok(Self {
            data,
            constraints,
            data_sum,
        })
    }

    pub fn data(&self) -> &Mat<T> {
        &self.data
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

    /// Index of the nearest center for every data point (first on ties).
    pub fn assignments(&self, x: &Mat<T>) -> Result<Vec<usize>> {
        self.check(x)?;
        Ok(self
            .data
            .row_iter()
            .map(|a| argmin(x.row_iter().map(|c| scalar::dist_sq(c, a))).0)
            .collect())
    }

    fn min_dist_sum(&self, x: &Mat<T>) -> T {
        self.data
            .row_iter()
            .map(|a| argmin(x.row_iter().map(|c| scalar::dist_sq(c, a))).1)
            .sum()
    }

    /// `ψ(X) = Σ_i min_ℓ ‖x^ℓ − a^i‖²`
    pub fn eval_cost(&self, x: &Mat<T>) -> Result<T> {
        self.check(x)?;
        Ok(self.min_dist_sum(x))
    }

    pub fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T> {
        self.check(x)?;
        let half = T::lit(0.5);
        Ok(half * self.min_dist_sum(x) + half * tau * self.constraints.penalty(x))
    }

    /// DC components `(g(X), h(X))`.
    pub fn eval_g_h(&self, x: &Mat<T>, tau: T) -> Result<(T, T)> {
        self.check(x)?;
        let half = T::lit(0.5);
        let q = T::from_count(self.constraints.q());
        let mut g1 = T::zero();
        let mut h1 = T::zero();
        for a in self.data.row_iter() {
            let mut total = T::zero();
            let mut smallest = T::infinity();
            for c in x.row_iter() {
                let dsq = scalar::dist_sq(c, a);
                total += dsq;
                smallest = smallest.min(dsq);
            }
            g1 += total;
            // max_r Σ_{ℓ≠r} = total − min_ℓ
            h1 += total - smallest;
        }
        let g = half * g1 + half * tau * q * x.frobenius_sq();
        let h = half * h1 + half * tau * self.constraints.phi_sum(x);
        Ok((g, h))
    }

    /// `∇g(X) = (m + τq) X − E·A`
    pub fn grad_g(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        let modulus = self.g_modulus(tau);
        let mut out = x.clone();
        out.scale(modulus);
        for l in 0..out.rows() {
            for (o, &s) in out.row_mut(l).iter_mut().zip(&self.data_sum) {
                *o -= s;
            }
        }
        Ok(out)
    }

    /// Residual sum `Σ_i e_{r(i)} (x^{r(i)} − a^i)`.
    fn assignment_residual(&self, x: &Mat<T>) -> Mat<T> {
        let mut acc = Mat::zeros(x.rows(), x.cols());
        for a in self.data.row_iter() {
            let (r, _) = argmin(x.row_iter().map(|c| scalar::dist_sq(c, a)));
            let xr = x.row(r);
            for ((s, &xv), &av) in acc.row_mut(r).iter_mut().zip(xr).zip(a) {
                *s += xv - av;
            }
        }
        acc
    }

    /// Subgradient `Y = W + τU ∈ ∂h(X)` with `W = mX − E·A − Σ_i e_{r(i)}(x^{r(i)} − a^i)`.
    pub fn h_subgradient(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        let m = T::from_count(self.data.rows());
        let resid = self.assignment_residual(x);
        let u = self.constraints.projection_sum(x);
        let mut y = Mat::zeros(x.rows(), x.cols());
        for l in 0..x.rows() {
            let (xr, rr, ur) = (x.row(l), resid.row(l), u.row(l));
            for (j, o) in y.row_mut(l).iter_mut().enumerate() {
                *o = m * xr[j] - self.data_sum[j] - rr[j] + tau * ur[j];
            }
        }
        Ok(y)
    }

    /// Closed-form DCA point `(mX + τU − Σ_i e_{r(i)}(x^{r(i)} − a^i)) / (m + τq)`.
    pub fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        self.check(x)?;
        if !(tau > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        let m = T::from_count(self.data.rows());
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

impl<T: Scalar> DcProblem<T> for ClusteringProblem<T> {
    fn dims(&self) -> Dims {
        Dims {
            m: self.data.rows(),
            k: self.constraints.k(),
            d: self.constraints.dim(),
            q: self.constraints.q(),
        }
    }

    fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T> {
        ClusteringProblem::eval_penalized(self, x, tau)
    }

    fn eval_cost(&self, x: &Mat<T>) -> Result<T> {
        ClusteringProblem::eval_cost(self, x)
    }

    fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        ClusteringProblem::dca_point(self, x, tau)
    }
}
