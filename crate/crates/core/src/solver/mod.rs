//! Problem-agnostic DCA and boosted DCA drivers with a quadratic-penalty outer loop.
//!
//! A model implements [`DcProblem`]; the drivers only ever see the penalized
//! objective and the closed-form DCA point. Each penalty stage runs the inner
//! iteration at a fixed `τ` until the Frobenius step drops below the tolerance,
//! then `τ ← στ` while `τ < τ_f`.

mod diagnostics;
mod driver;
mod trial;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

pub use diagnostics::{check_descent, criticality_residual, Violation, ViolationKind};
pub(crate) use driver::digest;
pub use driver::{bdca_solve, dca_solve};
pub use trial::{next_trial_step, TrialHistory};

/// Dimensions of a clustering-type problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    /// number of data points or target sets
    pub m: usize,
    /// number of centers
    pub k: usize,
    pub d: usize,
    /// constraint sets per center
    pub q: usize,
}

/// A DC objective `f = g − h` whose convex subproblem has a closed-form solution.
///
/// `dca_point(X, τ)` is the unique minimizer of `g(·) − ⟨Y, ·⟩` for a
/// subgradient `Y ∈ ∂h(X)`; the two DCA half-steps are fused because the
/// conjugate of `g` is explicit.
pub trait DcProblem<T: Scalar> {
    fn dims(&self) -> Dims;

    /// Penalized objective at penalty parameter `tau`.
    fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T>;

    /// Unpenalized clustering cost `ψ`.
    fn eval_cost(&self, x: &Mat<T>) -> Result<T>;

    /// One closed-form DCA step.
    fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>>;

    /// Strong convexity modulus of `g` at penalty `tau`, i.e. `∇g(X) = modulus·X − const`.
    fn g_modulus(&self, tau: T) -> T {
        let dims = self.dims();
        T::from_count(dims.m) + tau * T::from_count(dims.q)
    }

    fn shape(&self) -> (usize, usize) {
        let dims = self.dims();
        (dims.k, dims.d)
    }
}

impl<T: Scalar, P: DcProblem<T> + ?Sized> DcProblem<T> for &P {
    fn dims(&self) -> Dims {
        (**self).dims()
    }
    fn eval_penalized(&self, x: &Mat<T>, tau: T) -> Result<T> {
        (**self).eval_penalized(x, tau)
    }
    fn eval_cost(&self, x: &Mat<T>) -> Result<T> {
        (**self).eval_cost(x)
    }
    fn dca_point(&self, x: &Mat<T>, tau: T) -> Result<Mat<T>> {
        (**self).dca_point(x, tau)
    }
    fn g_modulus(&self, tau: T) -> T {
        (**self).g_modulus(tau)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrialPolicy<T> {
    /// Same trial step every iteration. `lambda_bar = 0` reduces BDCA to DCA.
    Constant { lambda_bar: T },
    /// Grow the trial step by `gamma` after two consecutive untouched trials,
    /// otherwise reuse the last accepted step.
    SelfAdaptive { gamma: T, lambda_bar_1: T },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSearchParams<T> {
    pub alpha: T,
    pub beta: T,
    pub trial_policy: TrialPolicy<T>,
}

impl<T: Scalar> LineSearchParams<T> {
    pub fn new(alpha: T, beta: T, trial_policy: TrialPolicy<T>) -> Result<Self> {
        let ls = Self {
            alpha,
            beta,
            trial_policy,
        };
        ls.validate()?;
        Ok(ls)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.beta > T::zero() && self.beta < T::one()) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0,1), got {}",
                self.beta
            )));
        }
        match self.trial_policy {
            TrialPolicy::Constant { lambda_bar } => {
                if !(lambda_bar >= T::zero()) || !lambda_bar.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "constant trial step must be nonnegative, got {lambda_bar}"
                    )));
                }
            }
            TrialPolicy::SelfAdaptive {
                gamma,
                lambda_bar_1,
            } => {
                if !(gamma > T::one()) || !gamma.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "gamma must exceed 1, got {gamma}"
                    )));
                }
                if !(lambda_bar_1 > T::zero()) || !lambda_bar_1.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "initial trial step must be positive, got {lambda_bar_1}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltySchedule<T> {
    pub tau0: T,
    pub sigma: T,
    pub tau_f: T,
}

impl<T: Scalar> PenaltySchedule<T> {
    pub fn new(tau0: T, sigma: T, tau_f: T) -> Result<Self> {
        let s = Self { tau0, sigma, tau_f };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau0 > T::zero()) || !self.tau0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau0 must be positive, got {}",
                self.tau0
            )));
        }
        if !(self.sigma > T::one()) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must exceed 1, got {}",
                self.sigma
            )));
        }
        if !(self.tau_f >= self.tau0) || !self.tau_f.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tau_f must be at least tau0, got {}",
                self.tau_f
            )));
        }
        Ok(())
    }

    /// Penalty values of the stages that run: `τ₀, στ₀, σ²τ₀, …` strictly below `τ_f`.
    pub fn stages(&self) -> Vec<T> {
        let mut out = Vec::new();
        let mut tau = self.tau0;
        while tau < self.tau_f {
            out.push(tau);
            tau *= self.sigma;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopRule<T> {
    /// Stage ends once `‖X_{p+1} − X_p‖_F < tol`.
    pub tol: T,
    pub max_inner_iters: usize,
    pub max_total_iters: usize,
}

impl<T: Scalar> StopRule<T> {
    pub fn new(tol: T) -> Result<Self> {
        let s = Self {
            tol,
            ..Self::default()
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_inner_iters == 0 || self.max_total_iters == 0 {
            return Err(Error::InvalidParameter(
                "iteration caps must be positive".into(),
            ));
        }
        Ok(())
    }
}

impl<T: Scalar> Default for StopRule<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-6),
            max_inner_iters: 10_000,
            max_total_iters: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StepTolerance,
    ZeroDirection,
    IterationCap,
}

/// One accepted iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub stage: usize,
    /// Global iteration index, continuing across stages (1-based).
    pub iteration: usize,
    pub tau: T,
    /// `f(X_{p−1})` at this stage's `τ`.
    pub objective_before: T,
    /// `f(X_p)`
    pub objective: T,
    /// `f(y_p)` at the DCA point (BDCA only).
    pub dca_objective: Option<T>,
    /// `f(y_p) − αλ²‖d_p‖²` for the accepted positive step (BDCA only).
    pub armijo_bound: Option<T>,
    pub trial_lambda: T,
    pub lambda: T,
    pub backtracks: usize,
    pub step_norm: T,
    /// Hash of the iterate's bit pattern; equal iterates give equal digests.
    pub iterate_digest: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSummary<T> {
    pub tau: T,
    pub iterations: usize,
    pub termination: Termination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    pub final_x: Mat<T>,
    /// Unpenalized cost `ψ` at `final_x`.
    pub cost: T,
    pub trace: Vec<TraceEntry<T>>,
    pub iterations_total: usize,
    pub iterations_per_stage: Vec<usize>,
    pub stages: Vec<StageSummary<T>>,
    pub wall_time_s: f64,
    pub termination: Termination,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError<T: Scalar> {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("numerical failure at iteration {}: {message}", report.iterations_total)]
    Numerical {
        message: String,
        report: Box<SolveReport<T>>,
    },
}
