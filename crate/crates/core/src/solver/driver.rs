use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use crate::error::Error;
use crate::matrix::Mat;
use crate::scalar::Scalar;

use super::{
    DcProblem, LineSearchParams, PenaltySchedule, SolveError, SolveReport, StageSummary, StopRule,
    Termination, TraceEntry, TrialHistory,
};

/// Below this the line search gives up and takes the plain DCA point.
const BACKTRACK_FLOOR: f64 = 1e-12;
/// `‖d‖_F` below this counts as a zero direction.
const ZERO_DIRECTION: f64 = 1e-15;

/// Classical DCA inside the penalty loop.
pub fn dca_solve<T: Scalar, P: DcProblem<T>>(
    problem: &P,
    x0: &Mat<T>,
    schedule: &PenaltySchedule<T>,
    stop: &StopRule<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    drive(problem, x0, schedule, stop, None)
}

/// Boosted DCA: DCA point followed by a backtracking search along `d = y − X`.
pub fn bdca_solve<T: Scalar, P: DcProblem<T>>(
    problem: &P,
    x0: &Mat<T>,
    schedule: &PenaltySchedule<T>,
    ls: &LineSearchParams<T>,
    stop: &StopRule<T>,
) -> Result<SolveReport<T>, SolveError<T>> {
    ls.validate()?;
    drive(problem, x0, schedule, stop, Some(ls))
}

pub(crate) fn digest<T: Scalar>(x: &Mat<T>) -> u64 {
    let mut h = DefaultHasher::new();
    x.shape().hash(&mut h);
    for v in x.as_slice() {
        v.as_f64().to_bits().hash(&mut h);
    }
    h.finish()
}

struct Run<T> {
    trace: Vec<TraceEntry<T>>,
    stages: Vec<StageSummary<T>>,
    started: Instant,
}

impl<T: Scalar> Run<T> {
    fn report<P: DcProblem<T>>(
        self,
        problem: &P,
        x: Mat<T>,
        termination: Termination,
    ) -> SolveReport<T> {
        let cost = problem.eval_cost(&x).unwrap_or_else(|_| T::nan());
        SolveReport {
            cost,
            iterations_total: self.trace.len(),
            iterations_per_stage: self.stages.iter().map(|s| s.iterations).collect(),
            trace: self.trace,
            stages: self.stages,
            final_x: x,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            termination,
        }
    }
}

fn drive<T: Scalar, P: DcProblem<T>>(
    problem: &P,
    x0: &Mat<T>,
    schedule: &PenaltySchedule<T>,
    stop: &StopRule<T>,
    ls: Option<&LineSearchParams<T>>,
) -> Result<SolveReport<T>, SolveError<T>> {
    schedule.validate()?;
    stop.validate()?;
    if x0.shape() != problem.shape() {
        return Err(Error::ShapeMismatch {
            expected: problem.shape(),
            found: x0.shape(),
        }
        .into());
    }

    let mut run = Run {
        trace: Vec::new(),
        stages: Vec::new(),
        started: Instant::now(),
    };
    let floor = T::lit(BACKTRACK_FLOOR);
    let zero_dir = T::lit(ZERO_DIRECTION);

    let mut x = x0.clone();
    let mut p = 0usize;
    let mut capped = false;
    let mut last = Termination::StepTolerance;

    macro_rules! numerical {
        ($run:expr, $x:expr, $($msg:tt)*) => {
            return Err(SolveError::Numerical {
                message: format!($($msg)*),
                report: Box::new($run.report(problem, $x, Termination::IterationCap)),
            })
        };
    }

    for (stage, tau) in schedule.stages().into_iter().enumerate() {
        let mut f_x = problem.eval_penalized(&x, tau)?;
        if !f_x.is_finite() {
            numerical!(run, x, "objective is {f_x} at the start of stage {stage}");
        }
        let mut history = TrialHistory::new();
        let mut inner = 0usize;

        let termination = loop {
            if p >= stop.max_total_iters {
                capped = true;
                break Termination::IterationCap;
            }
            if inner >= stop.max_inner_iters {
                break Termination::IterationCap;
            }
            let y = problem.dca_point(&x, tau)?;
            p += 1;
            inner += 1;

            let Some(ls) = ls else {
                let f_y = problem.eval_penalized(&y, tau)?;
                let step = x.frobenius_dist(&y);
                run.trace.push(TraceEntry {
                    stage,
                    iteration: p,
                    tau,
                    objective_before: f_x,
                    objective: f_y,
                    dca_objective: None,
                    armijo_bound: None,
                    trial_lambda: T::zero(),
                    lambda: T::zero(),
                    backtracks: 0,
                    step_norm: step,
                    iterate_digest: digest(&y),
                });
                x = y;
                f_x = f_y;
                if !f_x.is_finite() {
                    numerical!(run, x, "objective is {f_x} at iteration {p}");
                }
                if step < stop.tol {
                    break Termination::StepTolerance;
                }
                continue;
            };

            let d = y.sub(&x);
            let d_norm_sq = d.frobenius_sq();
            let f_y = problem.eval_penalized(&y, tau)?;
            if !f_y.is_finite() {
                numerical!(
                    run,
                    x,
                    "objective is {f_y} at the DCA point of iteration {p}"
                );
            }
            if d_norm_sq.sqrt() < zero_dir {
                let step = x.frobenius_dist(&y);
                run.trace.push(TraceEntry {
                    stage,
                    iteration: p,
                    tau,
                    objective_before: f_x,
                    objective: f_y,
                    dca_objective: Some(f_y),
                    armijo_bound: None,
                    trial_lambda: T::zero(),
                    lambda: T::zero(),
                    backtracks: 0,
                    step_norm: step,
                    iterate_digest: digest(&y),
                });
                x = y;
                break Termination::ZeroDirection;
            }

            let trial = history.next_trial(&ls.trial_policy);
            let mut lambda = trial;
            let mut backtracks = 0usize;
            let mut accepted: Option<(Mat<T>, T, T)> = None;
            while lambda > T::zero() {
                if lambda < floor {
                    lambda = T::zero();
                    break;
                }
                let z = y.add_scaled(lambda, &d);
                let f_z = problem.eval_penalized(&z, tau)?;
                let bound = f_y - ls.alpha * lambda * lambda * d_norm_sq;
                if f_z <= bound {
                    accepted = Some((z, f_z, bound));
                    break;
                }
                lambda *= ls.beta;
                backtracks += 1;
            }
            history.record(trial, lambda);

            let (x_new, f_new, armijo_bound) = match accepted {
                Some((z, f_z, bound)) => (z, f_z, Some(bound)),
                None => (y, f_y, None),
            };
            let step = x.frobenius_dist(&x_new);
            run.trace.push(TraceEntry {
                stage,
                iteration: p,
                tau,
                objective_before: f_x,
                objective: f_new,
                dca_objective: Some(f_y),
                armijo_bound,
                trial_lambda: trial,
                lambda,
                backtracks,
                step_norm: step,
                iterate_digest: digest(&x_new),
            });
            x = x_new;
            f_x = f_new;
            if step < stop.tol {
                break Termination::StepTolerance;
            }
        };

        run.stages.push(StageSummary {
            tau,
            iterations: inner,
            termination,
        });
        last = termination;
        if capped {
            break;
        }
    }

    let overall = if run
        .stages
        .iter()
        .any(|s| s.termination == Termination::IterationCap)
    {
        Termination::IterationCap
    } else {
        last
    };
    Ok(run.report(problem, x, overall))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::solver::{check_descent, Dims, TrialPolicy};

    /// `f(x) = x²` with DCA point `x/2`.
    struct Halving;

    impl DcProblem<f64> for Halving {
        fn dims(&self) -> Dims {
            Dims {
                m: 1,
                k: 1,
                d: 1,
                q: 0,
            }
        }
        fn eval_penalized(&self, x: &Mat<f64>, _tau: f64) -> Result<f64> {
            Ok(x.as_slice()[0].powi(2))
        }
        fn eval_cost(&self, x: &Mat<f64>) -> Result<f64> {
            Ok(x.as_slice()[0].powi(2))
        }
        fn dca_point(&self, x: &Mat<f64>, _tau: f64) -> Result<Mat<f64>> {
            Ok(x.map(|v| v / 2.0))
        }
    }

    /// Objective that never changes, so the DCA point is `X` itself.
    struct Frozen;

    impl DcProblem<f64> for Frozen {
        fn dims(&self) -> Dims {
            Dims {
                m: 1,
                k: 2,
                d: 2,
                q: 1,
            }
        }
        fn eval_penalized(&self, _x: &Mat<f64>, _tau: f64) -> Result<f64> {
            Ok(1.0)
        }
        fn eval_cost(&self, _x: &Mat<f64>) -> Result<f64> {
            Ok(2.0)
        }
        fn dca_point(&self, x: &Mat<f64>, _tau: f64) -> Result<Mat<f64>> {
            Ok(x.clone())
        }
    }

    struct Exploding;

    impl DcProblem<f64> for Exploding {
        fn dims(&self) -> Dims {
            Dims {
                m: 1,
                k: 1,
                d: 1,
                q: 0,
            }
        }
        fn eval_penalized(&self, x: &Mat<f64>, _tau: f64) -> Result<f64> {
            let v = x.as_slice()[0];
            Ok(if v > 4.0 { f64::INFINITY } else { -v })
        }
        fn eval_cost(&self, _x: &Mat<f64>) -> Result<f64> {
            Ok(0.0)
        }
        fn dca_point(&self, x: &Mat<f64>, _tau: f64) -> Result<Mat<f64>> {
            Ok(x.map(|v| v + 1.0))
        }
    }

    fn scalar(v: f64) -> Mat<f64> {
        Mat::from_vec(1, 1, vec![v]).unwrap()
    }

    fn single_stage() -> PenaltySchedule<f64> {
        PenaltySchedule::new(1.0, 10.0, 2.0).unwrap()
    }

    /// Independent scalar transcription of the backtracking rule.
    fn scalar_backtrack(x: f64, alpha: f64, beta: f64, trial: f64) -> f64 {
        let f = |v: f64| v * v;
        let y = x / 2.0;
        let d = y - x;
        let mut lam = trial;
        while f(y + lam * d) > f(y) - alpha * lam * lam * d * d {
            lam *= beta;
        }
        y + lam * d
    }

    #[test]
    fn backtracking_on_halving_surrogate() {
        let ls =
            LineSearchParams::new(0.05, 0.1, TrialPolicy::Constant { lambda_bar: 2.0 }).unwrap();
        let stop = StopRule {
            max_inner_iters: 1,
            ..StopRule::default()
        };
        let r = bdca_solve(&Halving, &scalar(1.0), &single_stage(), &ls, &stop).unwrap();
        let e = &r.trace[0];
        assert_eq!(e.trial_lambda, 2.0);
        assert_eq!(e.backtracks, 1);
        assert!((e.lambda - 0.2).abs() < 1e-15);
        assert!((r.final_x.as_slice()[0] - 0.4).abs() < 1e-15);
        assert!((scalar_backtrack(1.0, 0.05, 0.1, 2.0) - 0.4).abs() < 1e-15);
        assert_eq!(
            r.final_x.as_slice()[0],
            scalar_backtrack(1.0, 0.05, 0.1, 2.0)
        );
    }

    #[test]
    fn first_trial_accepted_when_condition_holds() {
        // d = -0.5, y = 0.5; λ = 0.5 lands on the minimizer: f = 0 ≤ 0.25 − 0.05·0.25·0.25
        let ls =
            LineSearchParams::new(0.05, 0.1, TrialPolicy::Constant { lambda_bar: 0.5 }).unwrap();
        let stop = StopRule {
            max_inner_iters: 1,
            ..StopRule::default()
        };
        let r = bdca_solve(&Halving, &scalar(1.0), &single_stage(), &ls, &stop).unwrap();
        assert_eq!(r.trace[0].backtracks, 0);
        assert_eq!(r.trace[0].lambda, 0.5);
        assert_eq!(r.final_x.as_slice()[0], 0.5 + 0.5 * -0.5);
    }

    #[test]
    fn zero_direction_stops_the_stage() {
        let ls =
            LineSearchParams::new(0.05, 0.1, TrialPolicy::Constant { lambda_bar: 2.0 }).unwrap();
        let x0 = Mat::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let r = bdca_solve(&Frozen, &x0, &single_stage(), &ls, &StopRule::default()).unwrap();
        assert_eq!(r.termination, Termination::ZeroDirection);
        assert_eq!(r.iterations_total, 1);
        assert_eq!(r.final_x, x0);
    }

    #[test]
    fn fixed_point_ends_each_stage_after_one_iteration() {
        let x0 = Mat::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let schedule = PenaltySchedule::new(1.0, 10.0, 1e8).unwrap();
        let r = dca_solve(&Frozen, &x0, &schedule, &StopRule::default()).unwrap();
        assert_eq!(r.termination, Termination::StepTolerance);
        assert_eq!(r.iterations_per_stage, vec![1; 8]);
        assert_eq!(r.cost, 2.0);
    }

    #[test]
    fn dca_on_halving_converges_and_descends() {
        let r = dca_solve(
            &Halving,
            &scalar(1.0),
            &single_stage(),
            &StopRule::default(),
        )
        .unwrap();
        assert_eq!(r.termination, Termination::StepTolerance);
        assert!(r.final_x.as_slice()[0].abs() < 1e-6);
        assert!(check_descent(&r).is_empty());
    }

    #[test]
    fn inner_cap_is_reported() {
        let stop = StopRule {
            tol: 1e-300,
            max_inner_iters: 5,
            max_total_iters: 1000,
        };
        let r = dca_solve(&Halving, &scalar(1.0), &single_stage(), &stop).unwrap();
        assert_eq!(r.termination, Termination::IterationCap);
        assert_eq!(r.iterations_total, 5);
    }

    #[test]
    fn total_cap_stops_all_stages() {
        let stop = StopRule {
            tol: 1e-300,
            max_inner_iters: 5,
            max_total_iters: 7,
        };
        let schedule = PenaltySchedule::new(1.0, 10.0, 1e8).unwrap();
        let r = dca_solve(&Halving, &scalar(1.0), &schedule, &stop).unwrap();
        assert_eq!(r.iterations_total, 7);
        assert_eq!(r.iterations_per_stage, vec![5, 2]);
    }

    #[test]
    fn non_finite_objective_is_a_numerical_failure() {
        let err = dca_solve(
            &Exploding,
            &scalar(0.0),
            &single_stage(),
            &StopRule::default(),
        )
        .unwrap_err();
        match err {
            SolveError::Numerical { report, .. } => assert_eq!(report.iterations_total, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let x0 = Mat::from_rows(&[[1.0, 2.0]]).unwrap();
        let err = dca_solve(&Frozen, &x0, &single_stage(), &StopRule::default()).unwrap_err();
        assert!(matches!(
            err,
            SolveError::Invalid(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn zero_trial_matches_dca_exactly() {
        let ls =
            LineSearchParams::new(0.05, 0.1, TrialPolicy::Constant { lambda_bar: 0.0 }).unwrap();
        let a = dca_solve(
            &Halving,
            &scalar(3.0),
            &single_stage(),
            &StopRule::default(),
        )
        .unwrap();
        let b = bdca_solve(
            &Halving,
            &scalar(3.0),
            &single_stage(),
            &ls,
            &StopRule::default(),
        )
        .unwrap();
        let da: Vec<_> = a.trace.iter().map(|e| e.iterate_digest).collect();
        let db: Vec<_> = b.trace.iter().map(|e| e.iterate_digest).collect();
        assert_eq!(da, db);
        assert_eq!(a.final_x, b.final_x);
    }
}
