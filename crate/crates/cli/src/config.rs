//! TOML experiment files.
//!
//! Relative paths are resolved against the directory holding the config file.
//! Every section rejects unknown keys so typos surface as errors.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use dcclust::bench::{Algorithm, Instance, ScalingModel, ScalingSpec, SolverSettings};
use dcclust::io::{self, Dataset, RandomSpec, ReportFormat};
use dcclust::{
    ClusteringProblemF64, ConstraintSystemF64, ConvexSetF64, MatF64, SetClusteringProblemF64,
};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dataset: Option<DatasetConfig>,
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub bench: Option<BenchConfig>,
    pub scaling: Option<ScalingConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    Tsplib {
        path: PathBuf,
    },
    CitiesCsv {
        path: PathBuf,
        #[serde(default = "default_radius_scale")]
        radius_scale: f64,
    },
    PointsCsv {
        path: PathBuf,
    },
    Random {
        n: usize,
        dim: usize,
        #[serde(default)]
        low: f64,
        #[serde(default = "default_high")]
        high: f64,
        #[serde(default)]
        seed: u64,
    },
    Inline {
        points: Option<Vec<Vec<f64>>>,
        sets: Option<Vec<ConvexSetF64>>,
    },
}

fn default_radius_scale() -> f64 {
    0.1
}

fn default_high() -> f64 {
    10.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Clustering,
    SetClustering,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterConfig {
    #[serde(default)]
    pub constraints: Vec<ConvexSetF64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    /// Defaults to the number of `[[problem.centers]]` entries.
    pub k: Option<usize>,
    #[serde(default)]
    pub centers: Vec<CenterConfig>,
    /// Turns point data into balls of this radius for set clustering.
    pub target_radius: Option<f64>,
    /// Explicit starting centers; otherwise drawn from the constraints.
    pub initial: Option<Vec<Vec<f64>>>,
}

/// Unset fields fall back to [`SolverSettings::default`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub algorithm: Option<Algorithm>,
    /// Seed for drawing the starting centers in `solve`.
    #[serde(default)]
    pub seed: u64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda_bar_1: Option<f64>,
    pub tau0: Option<f64>,
    pub sigma: Option<f64>,
    pub tau_f: Option<f64>,
    pub tol: Option<f64>,
    pub max_inner_iters: Option<usize>,
    pub max_total_iters: Option<usize>,
}

impl SolverConfig {
    pub fn algorithm(&self) -> Algorithm {
        self.algorithm.unwrap_or(Algorithm::Bdca)
    }

    pub fn settings(&self) -> SolverSettings {
        let d = SolverSettings::default();
        SolverSettings {
            alpha: self.alpha.unwrap_or(d.alpha),
            beta: self.beta.unwrap_or(d.beta),
            lambda_bar: self.lambda_bar.unwrap_or(d.lambda_bar),
            gamma: self.gamma.unwrap_or(d.gamma),
            lambda_bar_1: self.lambda_bar_1.unwrap_or(d.lambda_bar_1),
            tau0: self.tau0.unwrap_or(d.tau0),
            sigma: self.sigma.unwrap_or(d.sigma),
            tau_f: self.tau_f.unwrap_or(d.tau_f),
            tol: self.tol.unwrap_or(d.tol),
            max_inner_iters: self.max_inner_iters.unwrap_or(d.max_inner_iters),
            max_total_iters: self.max_total_iters.unwrap_or(d.max_total_iters),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub warmup: usize,
}

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_restarts() -> usize {
    100
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub model: ScalingModel,
    pub dims: Vec<usize>,
    pub sizes: Vec<usize>,
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub data_seed: u64,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default)]
    pub low: f64,
    #[serde(default = "default_high")]
    pub high: f64,
    #[serde(default = "default_target_radius")]
    pub target_radius: f64,
}

fn default_warmup() -> usize {
    3
}

fn default_target_radius() -> f64 {
    0.1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File name prefix; defaults to the config file stem.
    pub prefix: Option<String>,
    /// Format of the per-iteration trace written by `solve`.
    pub trace_format: Option<ReportFormat>,
}

/// A parsed config plus the location it came from.
pub struct Loaded {
    pub config: Config,
    pub base_dir: PathBuf,
    pub stem: String,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config: Config =
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    config.solver.settings().validate().context("[solver]")?;
    Ok(Loaded {
        config,
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        stem: path
            .file_stem()
            .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned()),
    })
}

impl Loaded {
    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn dataset(&self) -> Result<Dataset> {
        let ds = self
            .config
            .dataset
            .as_ref()
            .context("missing [dataset] section")?;
        let loaded = match ds {
            DatasetConfig::Tsplib { path } => io::load_tsplib(self.resolve(path))?,
            DatasetConfig::CitiesCsv { path, radius_scale } => {
                io::load_cities_csv(self.resolve(path), *radius_scale)?
            }
            DatasetConfig::PointsCsv { path } => io::load_points_csv(self.resolve(path))?,
            DatasetConfig::Random { .. } => io::generate_uniform(self.random_spec()?)?,
            DatasetConfig::Inline { points, sets } => match (points, sets) {
                (Some(p), None) => Dataset {
                    content: io::DatasetContent::Points {
                        points: MatF64::from_rows(p).context("dataset.points")?,
                    },
                    labels: None,
                    source: "inline".into(),
                },
                (None, Some(s)) => {
                    ensure!(!s.is_empty(), "dataset.sets: empty");
                    Dataset {
                        content: io::DatasetContent::Sets { sets: s.clone() },
                        labels: None,
                        source: "inline".into(),
                    }
                }
                _ => bail!("dataset: inline data needs exactly one of `points` or `sets`"),
            },
        };
        Ok(loaded)
    }

    pub fn random_spec(&self) -> Result<RandomSpec> {
        match self.config.dataset.as_ref() {
            Some(DatasetConfig::Random {
                n,
                dim,
                low,
                high,
                seed,
            }) => {
                let spec = RandomSpec {
                    n: *n,
                    dim: *dim,
                    low: *low,
                    high: *high,
                    seed: *seed,
                };
                ensure!(spec.n > 0, "dataset.n: must be positive");
                ensure!(spec.dim > 0, "dataset.dim: must be positive");
                ensure!(
                    spec.low < spec.high,
                    "dataset.low/high: need low < high, got [{}, {})",
                    spec.low,
                    spec.high
                );
                Ok(spec)
            }
            _ => bail!("dataset: `generate` needs kind = \"random\""),
        }
    }

    fn problem_config(&self) -> Result<&ProblemConfig> {
        self.config
            .problem
            .as_ref()
            .context("missing [problem] section")
    }

    pub fn instance(&self, data: Dataset) -> Result<Instance> {
        let pc = self.problem_config()?;
        let dim = data.dim();
        let k = pc.k.unwrap_or(pc.centers.len());
        ensure!(k > 0, "problem.k: need at least one center");
        ensure!(
            pc.centers.len() <= k,
            "problem.centers: {} entries but k = {k}",
            pc.centers.len()
        );
        let mut per_center: Vec<Vec<ConvexSetF64>> = Vec::with_capacity(k);
        for (l, c) in pc.centers.iter().enumerate() {
            for (j, s) in c.constraints.iter().enumerate() {
                ensure!(
                    s.dim() == dim,
                    "problem.centers[{l}].constraints[{j}]: dimension {} but data has dimension {dim}",
                    s.dim()
                );
            }
            per_center.push(c.constraints.clone());
        }
        per_center.resize_with(k, Vec::new);
        let cs = ConstraintSystemF64::new(dim, per_center)?;

        Ok(match pc.kind {
            ProblemKind::Clustering => {
                ensure!(
                    pc.target_radius.is_none(),
                    "problem.target_radius: only valid for set_clustering"
                );
                let points = data
                    .points()
                    .context("problem.kind: clustering needs point data")?
                    .clone();
                Instance::Clustering(ClusteringProblemF64::new(points, cs)?)
            }
            ProblemKind::SetClustering => {
                let data = match pc.target_radius {
                    Some(r) => data.into_balls(r).context("problem.target_radius")?,
                    None => data,
                };
                let sets = data
                    .sets()
                    .context(
                        "problem.kind: set_clustering needs set data or problem.target_radius",
                    )?
                    .to_vec();
                Instance::SetClustering(SetClusteringProblemF64::new(sets, cs)?)
            }
        })
    }

    pub fn initial(&self) -> Result<Option<MatF64>> {
        let pc = self.problem_config()?;
        pc.initial
            .as_ref()
            .map(|rows| MatF64::from_rows(rows).context("problem.initial"))
            .transpose()
    }

    pub fn bench(&self) -> Result<&BenchConfig> {
        let b = self
            .config
            .bench
            .as_ref()
            .context("missing [bench] section")?;
        ensure!(b.restarts >= 1, "bench.restarts: must be at least 1");
        ensure!(!b.algorithms.is_empty(), "bench.algorithms: empty");
        Ok(b)
    }

    pub fn scaling(&self) -> Result<ScalingSpec> {
        let s = self
            .config
            .scaling
            .as_ref()
            .context("missing [scaling] section")?;
        ensure!(
            !s.dims.is_empty() && !s.sizes.is_empty(),
            "scaling.dims/sizes: empty grid"
        );
        ensure!(
            s.dims.iter().all(|&d| d > 0),
            "scaling.dims: must be positive"
        );
        ensure!(
            s.sizes.iter().all(|&n| n > 0),
            "scaling.sizes: must be positive"
        );
        ensure!(s.restarts >= 1, "scaling.restarts: must be at least 1");
        ensure!(!s.algorithms.is_empty(), "scaling.algorithms: empty");
        ensure!(s.low < s.high, "scaling.low/high: need low < high");
        ensure!(
            s.target_radius > 0.0,
            "scaling.target_radius: must be positive"
        );
        if s.model == ScalingModel::SetClustering {
            ensure!(
                s.dims.iter().all(|&d| d <= 10),
                "scaling.dims: set clustering template stops at 10"
            );
        }
        Ok(ScalingSpec {
            model: s.model,
            dims: s.dims.clone(),
            sizes: s.sizes.clone(),
            restarts: s.restarts,
            base_seed: s.base_seed,
            data_seed: s.data_seed,
            algorithms: s.algorithms.clone(),
            settings: self.config.solver.settings(),
            warmup: s.warmup,
            low: s.low,
            high: s.high,
            target_radius: s.target_radius,
        })
    }
}
