//! Constrained clustering and set clustering by DCA and boosted DCA.
//!
//! Centers are the rows of a `k × d` matrix. Each center may be required to lie
//! in an intersection of closed convex sets; the requirement is enforced by a
//! quadratic penalty whose weight grows geometrically across stages. Every
//! stage is solved with a DC algorithm whose convex subproblem has a closed
//! form, optionally accelerated by an Armijo-type line search along the DCA
//! direction.
//!
//! ```
//! use dcclust::{ClusteringProblemF64, ConstraintSystemF64, ConvexSetF64, MatF64};
//! use dcclust::solver::{dca_solve, PenaltySchedule, StopRule};
//!
//! let data = MatF64::from_rows(&[[0.0, 0.0], [1.0, 0.0], [9.0, 9.0], [10.0, 9.0]]).unwrap();
//! let cs = ConstraintSystemF64::new(2, vec![
//!     vec![ConvexSetF64::ball(vec![0.0, 0.0], 1.0).unwrap()],
//!     vec![],
//! ]).unwrap();
//! let problem = ClusteringProblemF64::new(data, cs).unwrap();
//! let x0 = MatF64::from_rows(&[[0.0, 0.5], [5.0, 5.0]]).unwrap();
//! let schedule = PenaltySchedule::new(1.0, 10.0, 1e8).unwrap();
//! let report = dca_solve(&problem, &x0, &schedule, &StopRule::default()).unwrap();
//! assert!((report.final_x.row(1)[0] - 9.5).abs() < 1e-4);
//! ```

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod clustering;
pub mod constraints;
pub mod error;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod set_clustering;
pub mod sets;
pub mod solver;

pub use clustering::ClusteringProblem;
pub use constraints::ConstraintSystem;
pub use error::{Error, Result};
pub use matrix::Mat;
pub use scalar::Scalar;
pub use set_clustering::SetClusteringProblem;
pub use sets::ConvexSet;
pub use solver::{DcProblem, SolveError, SolveReport};

pub type MatF64 = Mat<f64>;
pub type MatF32 = Mat<f32>;
pub type ConvexSetF64 = ConvexSet<f64>;
pub type ConvexSetF32 = ConvexSet<f32>;
pub type ConstraintSystemF64 = ConstraintSystem<f64>;
pub type ConstraintSystemF32 = ConstraintSystem<f32>;
pub type ClusteringProblemF64 = ClusteringProblem<f64>;
pub type ClusteringProblemF32 = ClusteringProblem<f32>;
pub type SetClusteringProblemF64 = SetClusteringProblem<f64>;
pub type SetClusteringProblemF32 = SetClusteringProblem<f32>;
pub type SolveReportF64 = SolveReport<f64>;
pub type SolveReportF32 = SolveReport<f32>;
