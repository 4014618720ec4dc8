use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Mat;
use crate::scalar::Scalar;

use super::{DcProblem, SolveReport};

const REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Penalized objective went up within a stage.
    ObjectiveIncrease,
    /// `f(y_p) > f(X_{p−1})`: the DCA point failed to descend.
    DcaPointIncrease,
    /// Accepted step does not satisfy `f(y + λd) ≤ f(y) − αλ²‖d‖²`.
    ArmijoViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub stage: usize,
    pub iteration: usize,
    pub lhs: f64,
    pub rhs: f64,
}

fn exceeds<T: Scalar>(lhs: T, rhs: T) -> bool {
    let (l, r) = (lhs.as_f64(), rhs.as_f64());
    !(l <= r + REL_TOL * (1.0 + r.abs()))
}

/// Checks within-stage monotone descent and every recorded Armijo acceptance.
pub fn check_descent<T: Scalar>(report: &SolveReport<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut prev: Option<(usize, T)> = None;
    for e in &report.trace {
        let before = match prev {
            Some((stage, f)) if stage == e.stage => f,
            _ => e.objective_before,
        };
        let mut flag = |kind, lhs: T, rhs: T| {
            if exceeds(lhs, rhs) {
                out.push(Violation {
                    kind,
                    stage: e.stage,
                    iteration: e.iteration,
                    lhs: lhs.as_f64(),
                    rhs: rhs.as_f64(),
                });
            }
        };
        flag(ViolationKind::ObjectiveIncrease, e.objective, before);
        if let Some(f_y) = e.dca_objective {
            flag(ViolationKind::DcaPointIncrease, f_y, before);
        }
        if let Some(bound) = e.armijo_bound {
            flag(ViolationKind::ArmijoViolated, e.objective, bound);
        }
        prev = Some((e.stage, e.objective));
    }
    out
}

/// `‖∇g(X) − Y‖_F` for the subgradient `Y ∈ ∂h(X)` the model selects.
///
/// Zero exactly at critical points of the penalized objective. Since the DCA
/// point solves `∇g(X⁺) = Y`, this equals `modulus · ‖X − X⁺‖_F`.
pub fn criticality_residual<T: Scalar, P: DcProblem<T>>(
    problem: &P,
    x: &Mat<T>,
    tau: T,
) -> Result<T> {
    let next = problem.dca_point(x, tau)?;
    Ok(problem.g_modulus(tau) * x.frobenius_dist(&next))
}
