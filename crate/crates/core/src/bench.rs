//! Multi-start experiments and scaling sweeps.
//!
//! Every row of an experiment draws one initial point from the constraints
//! (seeded by `base_seed + row`) and hands the same matrix to every algorithm,
//! so per-row ratios are paired comparisons. Rows run in parallel on the
//! current rayon pool; results are ordered by row regardless of scheduling.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, Median, Statistics};

use crate::clustering::ClusteringProblem;
use crate::constraints::ConstraintSystem;
use crate::error::{Error, Result};
use crate::io::{generate_uniform, BenchRecord, RandomSpec};
use crate::matrix::Mat;
use crate::set_clustering::SetClusteringProblem;
use crate::sets::ConvexSet;
use crate::solver::{
    bdca_solve, dca_solve, digest, DcProblem, Dims, LineSearchParams, PenaltySchedule, SolveError,
    SolveReport, StopRule, Termination, TrialPolicy,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Dca,
    Bdca,
    BdcaAdaptive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Dca, Algorithm::Bdca, Algorithm::BdcaAdaptive];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dca => "dca",
            Algorithm::Bdca => "bdca",
            Algorithm::BdcaAdaptive => "bdca-adaptive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown algorithm `{s}` (expected dca, bdca or bdca-adaptive)"
                ))
            })
    }
}

/// Flat solver configuration shared by every algorithm in an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub alpha: f64,
    pub beta: f64,
    /// Constant trial step for `bdca`.
    pub lambda_bar: f64,
    /// Growth factor for `bdca-adaptive`.
    pub gamma: f64,
    /// First trial step for `bdca-adaptive`.
    pub lambda_bar_1: f64,
    pub tau0: f64,
    pub sigma: f64,
    pub tau_f: f64,
    pub tol: f64,
    pub max_inner_iters: usize,
    pub max_total_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let stop = StopRule::<f64>::default();
        Self {
            alpha: 0.05,
            beta: 0.1,
            lambda_bar: 2.0,
            gamma: 2.0,
            lambda_bar_1: 2.0,
            tau0: 1.0,
            sigma: 10.0,
            tau_f: 1e8,
            tol: stop.tol,
            max_inner_iters: stop.max_inner_iters,
            max_total_iters: stop.max_total_iters,
        }
    }
}

impl SolverSettings {
    pub fn schedule(&self) -> Result<PenaltySchedule<f64>> {
        PenaltySchedule::new(self.tau0, self.sigma, self.tau_f)
    }

    pub fn stop_rule(&self) -> Result<StopRule<f64>> {
        let stop = StopRule {
            tol: self.tol,
            max_inner_iters: self.max_inner_iters,
            max_total_iters: self.max_total_iters,
        };
        stop.validate()?;
        Ok(stop)
    }

    /// `None` for plain DCA.
    pub fn line_search(&self, algorithm: Algorithm) -> Result<Option<LineSearchParams<f64>>> {
        let policy = match algorithm {
            Algorithm::Dca => return Ok(None),
            Algorithm::Bdca => TrialPolicy::Constant {
                lambda_bar: self.lambda_bar,
            },
            Algorithm::BdcaAdaptive => TrialPolicy::SelfAdaptive {
                gamma: self.gamma,
                lambda_bar_1: self.lambda_bar_1,
            },
        };
        LineSearchParams::new(self.alpha, self.beta, policy).map(Some)
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule()?;
        self.stop_rule()?;
        for a in Algorithm::ALL {
            self.line_search(a)?;
        }
        Ok(())
    }

    pub fn solve<P: DcProblem<f64>>(
        &self,
        algorithm: Algorithm,
        problem: &P,
        x0: &Mat<f64>,
    ) -> std::result::Result<SolveReport<f64>, SolveError<f64>> {
        let schedule = self.schedule()?;
        let stop = self.stop_rule()?;
        match self.line_search(algorithm)? {
            None => dca_solve(problem, x0, &schedule, &stop),
            Some(ls) => bdca_solve(problem, x0, &schedule, &ls, &stop),
        }
    }
}

/// Either model behind one type, so experiments can hold both.
#[derive(Clone, Debug)]
pub enum Instance {
    Clustering(ClusteringProblem<f64>),
    SetClustering(SetClusteringProblem<f64>),
}

impl Instance {
    pub fn constraints(&self) -> &ConstraintSystem<f64> {
        match self {
            Instance::Clustering(p) => p.constraints(),
            Instance::SetClustering(p) => p.constraints(),
        }
    }
}

impl DcProblem<f64> for Instance {
    fn dims(&self) -> Dims {
        match self {
            Instance::Clustering(p) => p.dims(),
            Instance::SetClustering(p) => p.dims(),
        }
    }

    fn eval_penalized(&self, x: &Mat<f64>, tau: f64) -> Result<f64> {
        match self {
            Instance::Clustering(p) => p.eval_penalized(x, tau),
            Instance::SetClustering(p) => p.eval_penalized(x, tau),
        }
    }

    fn eval_cost(&self, x: &Mat<f64>) -> Result<f64> {
        match self {
            Instance::Clustering(p) => p.eval_cost(x),
            Instance::SetClustering(p) => p.eval_cost(x),
        }
    }

    fn dca_point(&self, x: &Mat<f64>, tau: f64) -> Result<Mat<f64>> {
        match self {
            Instance::Clustering(p) => p.dca_point(x, tau),
            Instance::SetClustering(p) => p.dca_point(x, tau),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub algorithms: Vec<Algorithm>,
    pub restarts: usize,
    pub base_seed: u64,
    pub settings: SolverSettings,
    /// Untimed solves from row 0's start before the timed rows.
    #[serde(default)]
    pub warmup: usize,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter(
                "restarts must be at least 1".into(),
            ));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("no algorithms selected".into()));
        }
        self.settings.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    /// `None` on success.
    pub error: Option<String>,
    pub iterations_total: usize,
    pub iterations_per_stage: Vec<usize>,
    pub wall_time_s: f64,
    /// `NaN` for failed runs.
    pub cost: f64,
    pub termination: Option<Termination>,
    pub final_x: Option<Mat<f64>>,
}

impl RunRecord {
    fn from_result(
        algorithm: Algorithm,
        res: std::result::Result<SolveReport<f64>, SolveError<f64>>,
    ) -> Self {
        match res {
            Ok(r) => RunRecord {
                algorithm,
                error: None,
                iterations_total: r.iterations_total,
                iterations_per_stage: r.iterations_per_stage,
                wall_time_s: r.wall_time_s,
                cost: r.cost,
                termination: Some(r.termination),
                final_x: Some(r.final_x),
            },
            Err(SolveError::Numerical { message, report }) => RunRecord {
                algorithm,
                error: Some(message),
                iterations_total: report.iterations_total,
                iterations_per_stage: report.iterations_per_stage,
                wall_time_s: report.wall_time_s,
                cost: f64::NAN,
                termination: None,
                final_x: None,
            },
            Err(SolveError::Invalid(e)) => RunRecord {
                algorithm,
                error: Some(e.to_string()),
                iterations_total: 0,
                iterations_per_stage: Vec::new(),
                wall_time_s: 0.0,
                cost: f64::NAN,
                termination: None,
                final_x: None,
            },
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Ratio `baseline / contender` for one row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub baseline: Algorithm,
    pub contender: Algorithm,
    /// Position of the contender in the algorithm list.
    pub column: usize,
    pub iteration_ratio: f64,
    pub time_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub run_id: usize,
    pub seed: u64,
    /// Digest of the shared initial matrix.
    pub x0_digest: u64,
    pub runs: Vec<RunRecord>,
    /// Empty when the row failed or only one algorithm ran.
    pub ratios: Vec<Ratio>,
}

impl ComparisonRow {
    pub fn failed(&self) -> bool {
        self.runs.iter().any(|r| !r.ok())
    }
}

/// Sample statistics; `std` is the `n − 1` estimator and is `NaN` for `n < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats {
                n: 0,
                mean: f64::NAN,
                median: f64::NAN,
                std: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
            };
        }
        Stats {
            n: values.len(),
            mean: values.mean(),
            median: Data::new(values.to_vec()).median(),
            std: values.std_dev(),
            min: values.min(),
            max: values.max(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub column: usize,
    pub runs_ok: usize,
    pub cost: Stats,
    pub iterations: Stats,
    pub wall_time_s: Stats,
    /// Entrywise mean of the final centers over successful runs.
    pub mean_centers: Option<Mat<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub baseline: Algorithm,
    pub contender: Algorithm,
    pub column: usize,
    pub iteration_ratio: Stats,
    pub time_ratio: Stats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub restarts: usize,
    pub failed_rows: usize,
    pub algorithms: Vec<AlgorithmSummary>,
    pub ratios: Vec<RatioSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<ComparisonRow>,
    pub summary: ExperimentSummary,
}

impl ExperimentResult {
    /// Long-format table, one record per (row, algorithm), in row order.
    pub fn records(&self) -> Vec<BenchRecord> {
        self.rows
            .iter()
            .flat_map(|row| {
                row.runs.iter().map(move |r| BenchRecord {
                    run_id: row.run_id,
                    seed: row.seed,
                    algorithm: r.algorithm.name().to_string(),
                    iterations_total: r.iterations_total,
                    wall_time_s: r.wall_time_s,
                    final_cost: r.cost,
                    stages: r.iterations_per_stage.clone(),
                })
            })
            .collect()
    }

    pub fn algorithm(&self, algorithm: Algorithm) -> Option<&AlgorithmSummary> {
        self.summary
            .algorithms
            .iter()
            .find(|a| a.algorithm == algorithm)
    }

    pub fn ratio(&self, contender: Algorithm) -> Option<&RatioSummary> {
        self.summary
            .ratios
            .iter()
            .find(|r| r.contender == contender)
    }
}

/// Index of the baseline column: the first `dca`, else the first algorithm.
fn baseline_column(algorithms: &[Algorithm]) -> usize {
    algorithms
        .iter()
        .position(|&a| a == Algorithm::Dca)
        .unwrap_or(0)
}

fn run_row(problem: &Instance, spec: &ExperimentSpec, run_id: usize) -> Result<ComparisonRow> {
    let seed = spec.base_seed.wrapping_add(run_id as u64);
    let x0 = problem
        .constraints()
        .sample_initial(&mut ChaCha8Rng::seed_from_u64(seed))?;
    let x0_digest = digest(&x0);
    let runs: Vec<RunRecord> = spec
        .algorithms
        .iter()
        .map(|&a| {
            let rec = RunRecord::from_result(a, spec.settings.solve(a, problem, &x0));
            assert_eq!(
                digest(&x0),
                x0_digest,
                "initial point changed during a paired row"
            );
            rec
        })
        .collect();
    let mut row = ComparisonRow {
        run_id,
        seed,
        x0_digest,
        runs,
        ratios: Vec::new(),
    };
    if !row.failed() {
        let b = baseline_column(&spec.algorithms);
        let base = &row.runs[b];
        row.ratios = row
            .runs
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != b)
            .map(|(c, r)| Ratio {
                baseline: base.algorithm,
                contender: r.algorithm,
                column: c,
                iteration_ratio: base.iterations_total as f64 / r.iterations_total.max(1) as f64,
                time_ratio: base.wall_time_s / r.wall_time_s.max(f64::MIN_POSITIVE),
            })
            .collect();
    }
    Ok(row)
}

fn summarize(spec: &ExperimentSpec, rows: &[ComparisonRow]) -> ExperimentSummary {
    let algorithms = spec
        .algorithms
        .iter()
        .enumerate()
        .map(|(c, &algorithm)| {
            let ok: Vec<&RunRecord> = rows.iter().map(|r| &r.runs[c]).filter(|r| r.ok()).collect();
            let pick = |f: fn(&RunRecord) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<_>>();
            let mean_centers = ok.first().and_then(|first| {
                let mut acc = Mat::zeros(
                    first.final_x.as_ref()?.rows(),
                    first.final_x.as_ref()?.cols(),
                );
                for r in &ok {
                    for (s, v) in acc
                        .as_mut_slice()
                        .iter_mut()
                        .zip(r.final_x.as_ref()?.as_slice())
                    {
                        *s += v;
                    }
                }
                acc.scale(1.0 / ok.len() as f64);
                Some(acc)
            });
            AlgorithmSummary {
                algorithm,
                column: c,
                runs_ok: ok.len(),
                cost: Stats::of(&pick(|r| r.cost)),
                iterations: Stats::of(&pick(|r| r.iterations_total as f64)),
                wall_time_s: Stats::of(&pick(|r| r.wall_time_s)),
                mean_centers,
            }
        })
        .collect();

    let b = baseline_column(&spec.algorithms);
    let ratios = (0..spec.algorithms.len())
        .filter(|&c| c != b)
        .map(|c| {
            let of_col = |f: fn(&Ratio) -> f64| {
                rows.iter()
                    .flat_map(|r| r.ratios.iter().filter(|x| x.column == c).map(f))
                    .collect::<Vec<_>>()
            };
            RatioSummary {
                baseline: spec.algorithms[b],
                contender: spec.algorithms[c],
                column: c,
                iteration_ratio: Stats::of(&of_col(|r| r.iteration_ratio)),
                time_ratio: Stats::of(&of_col(|r| r.time_ratio)),
            }
        })
        .collect();

    ExperimentSummary {
        experiment: spec.name.clone(),
        restarts: spec.restarts,
        failed_rows: rows.iter().filter(|r| r.failed()).count(),
        algorithms,
        ratios,
    }
}

/// Runs `spec.restarts` paired rows on `problem`.
///
/// A failing solve marks its row failed but never aborts the sweep. Errors
/// are returned only for an invalid spec or when no initial point can be drawn.
pub fn run_experiment(problem: &Instance, spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    if spec.warmup > 0 {
        let seed = spec.base_seed;
        let x0 = problem
            .constraints()
            .sample_initial(&mut ChaCha8Rng::seed_from_u64(seed))?;
        for _ in 0..spec.warmup {
            for &a in &spec.algorithms {
                let _ = spec.settings.solve(a, problem, &x0);
            }
        }
    }
    let rows = (0..spec.restarts)
        .into_par_iter()
        .map(|r| run_row(problem, spec, r))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(spec, &rows);
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        summary,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingModel {
    /// Points in `[low, high)^dim`, three centers each confined to a unit ball.
    Clustering,
    /// Small balls around random points, four centers each confined to the
    /// intersection of two unit balls.
    SetClustering,
}

const SET_TEMPLATE: [[[f64; 10]; 2]; 4] = [
    [
        [1., 5., 5., 5., 5., 5., 5., 5., 5., 5.],
        [2., 6., 5., 5., 5., 5., 5., 5., 5., 5.],
    ],
    [
        [5., 4., 1., 2., 3., 1., 2., 3., 1., 2.],
        [4., 4., 1., 2., 3., 1., 2., 3., 1., 2.],
    ],
    [
        [8., 5., 9., 8., 7., 9., 8., 7., 9., 8.],
        [8., 4., 9., 8., 7., 9., 8., 7., 9., 8.],
    ],
    [
        [9., 8., 1., 6., 9., 1., 6., 9., 1., 6.],
        [8., 8., 1., 6., 9., 1., 6., 9., 1., 6.],
    ],
];

/// Constraint sets per center for a scaling cell of dimension `dim`.
pub fn scaling_constraints(model: ScalingModel, dim: usize) -> Result<Vec<Vec<ConvexSet<f64>>>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    match model {
        ScalingModel::Clustering => {
            let patterns: [fn(usize) -> f64; 3] = [
                |j| if j % 2 == 0 { 1.0 } else { 5.0 },
                |j| if j % 2 == 0 { 6.0 } else { 4.0 },
                |_| 8.0,
            ];
            patterns
                .iter()
                .map(|p| Ok(vec![ConvexSet::ball((0..dim).map(p).collect(), 1.0)?]))
                .collect()
        }
        ScalingModel::SetClustering => {
            if dim > 10 {
                return Err(Error::InvalidParameter(format!(
                    "set clustering template is defined up to dimension 10, got {dim}"
                )));
            }
            SET_TEMPLATE
                .iter()
                .map(|pair| {
                    pair.iter()
                        .map(|c| ConvexSet::ball(c[..dim].to_vec(), 1.0))
                        .collect()
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub model: ScalingModel,
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    pub restarts: usize,
    pub base_seed: u64,
    /// Data for cell `(dim, n)` uses seed `data_seed + 1_000_000·dim + n`.
    pub data_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub settings: SolverSettings,
    pub warmup: usize,
    pub low: f64,
    pub high: f64,
    /// Radius of the target balls in the set clustering model.
    pub target_radius: f64,
}

impl ScalingSpec {
    pub fn new(model: ScalingModel, dims: Vec<usize>, sizes: Vec<usize>) -> Self {
        Self {
            model,
            dims,
            sizes,
            restarts: 100,
            base_seed: 0,
            data_seed: 0,
            algorithms: Algorithm::ALL.to_vec(),
            settings: SolverSettings::default(),
            warmup: 3,
            low: 0.0,
            high: 10.0,
            target_radius: 0.1,
        }
    }
}

/// Builds the instance for one cell of a scaling sweep.
pub fn scaling_instance(spec: &ScalingSpec, dim: usize, n: usize) -> Result<Instance> {
    let seed = spec
        .data_seed
        .wrapping_add(1_000_000u64.wrapping_mul(dim as u64))
        .wrapping_add(n as u64);
    let data = generate_uniform(RandomSpec {
        n,
        dim,
        low: spec.low,
        high: spec.high,
        seed,
    })?;
    let cs = ConstraintSystem::new(dim, scaling_constraints(spec.model, dim)?)?;
    match spec.model {
        ScalingModel::Clustering => {
            let pts = data.points().cloned().expect("generator yields points");
            Ok(Instance::Clustering(ClusteringProblem::new(pts, cs)?))
        }
        ScalingModel::SetClustering => {
            let sets = data
                .into_balls(spec.target_radius)?
                .sets()
                .expect("balls")
                .to_vec();
            Ok(Instance::SetClustering(SetClusteringProblem::new(
                sets, cs,
            )?))
        }
    }
}

/// One (dim, n, baseline, contender) cell of a scaling table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub model: ScalingModel,
    pub dim: usize,
    pub n: usize,
    pub baseline: Algorithm,
    pub contender: Algorithm,
    pub rows_ok: usize,
    pub rows_failed: usize,
    pub iteration_ratio: Stats,
    pub time_ratio: Stats,
    pub baseline_time_s: Stats,
    pub contender_time_s: Stats,
}

pub fn run_scaling(spec: &ScalingSpec) -> Result<Vec<ScalingRow>> {
    if spec.dims.is_empty() || spec.sizes.is_empty() {
        return Err(Error::InvalidParameter("scaling grid is empty".into()));
    }
    let mut out = Vec::new();
    for &dim in &spec.dims {
        for &n in &spec.sizes {
            let instance = scaling_instance(spec, dim, n)?;
            let exp = ExperimentSpec {
                name: format!("{:?} dim={dim} n={n}", spec.model),
                algorithms: spec.algorithms.clone(),
                restarts: spec.restarts,
                base_seed: spec.base_seed,
                settings: spec.settings,
                warmup: spec.warmup,
            };
            let res = run_experiment(&instance, &exp)?;
            let b = baseline_column(&spec.algorithms);
            let base = &res.summary.algorithms[b];
            for r in &res.summary.ratios {
                out.push(ScalingRow {
                    model: spec.model,
                    dim,
                    n,
                    baseline: r.baseline,
                    contender: r.contender,
                    rows_ok: r.iteration_ratio.n,
                    rows_failed: res.summary.failed_rows,
                    iteration_ratio: r.iteration_ratio,
                    time_ratio: r.time_ratio,
                    baseline_time_s: base.wall_time_s,
                    contender_time_s: res.summary.algorithms[r.column].wall_time_s,
                });
            }
        }
    }
    Ok(out)
}
