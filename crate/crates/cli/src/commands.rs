use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use dcclust::bench::{run_experiment, run_scaling, ExperimentSpec, ScalingRow};
use dcclust::io::{
    write_bench_table, write_json, write_points_csv, write_solve_report, ReportFormat,
};
use dcclust::{DcProblem, SolveError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{self, Loaded};
use crate::GlobalOpts;

pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Runtime(e) => e,
        }
    }
}

type Outcome = Result<(), Failure>;

trait OrConfig<T> {
    fn config(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> OrConfig<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }
    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

struct Output {
    dir: PathBuf,
    prefix: String,
}

impl Output {
    fn new(loaded: &Loaded, opts: &GlobalOpts) -> Self {
        let out = &loaded.config.output;
        let dir = match (&opts.out, &out.dir) {
            (Some(d), _) => d.clone(),
            (None, Some(d)) if d.is_absolute() => d.clone(),
            (None, Some(d)) => loaded.base_dir.join(d),
            (None, None) => PathBuf::from("out"),
        };
        let prefix = out.prefix.clone().unwrap_or_else(|| loaded.stem.clone());
        Output { dir, prefix }
    }

    /// Creates the directory; called only after the config has been fully validated.
    fn file(&self, suffix: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))
            .runtime()?;
        Ok(self.dir.join(format!("{}_{suffix}", self.prefix)))
    }
}

pub fn solve(path: &Path, opts: &GlobalOpts) -> Outcome {
    let loaded = config::load(path).config()?;
    let instance = loaded.instance(loaded.dataset().config()?).config()?;
    let seed = opts.seed.unwrap_or(loaded.config.solver.seed);
    let x0 = match loaded.initial().config()? {
        Some(x0) => {
            let want = instance.shape();
            if x0.shape() != want {
                return Err(Failure::Config(anyhow!(
                    "problem.initial: expected {}×{} centers, got {}×{}",
                    want.0,
                    want.1,
                    x0.rows(),
                    x0.cols()
                )));
            }
            x0
        }
        None => instance
            .constraints()
            .sample_initial(&mut ChaCha8Rng::seed_from_u64(seed))
            .context("drawing starting centers (give problem.initial for unconstrained centers)")
            .config()?,
    };
    let algorithm = loaded.config.solver.algorithm();
    let settings = loaded.config.solver.settings();
    let out = Output::new(&loaded, opts);

    let (report, failure) = match settings.solve(algorithm, &instance, &x0) {
        Ok(r) => (r, None),
        Err(SolveError::Numerical { message, report }) => (*report, Some(message)),
        Err(SolveError::Invalid(e)) => return Err(Failure::Config(e.into())),
    };

    let report_path = out.file("report.json")?;
    write_solve_report(&report, &report_path, ReportFormat::Json).runtime()?;
    let trace_format = loaded
        .config
        .output
        .trace_format
        .unwrap_or(ReportFormat::Csv);
    let ext = match trace_format {
        ReportFormat::Csv => "trace.csv",
        ReportFormat::Json => "trace.json",
    };
    let trace_path = out.file(ext)?;
    match trace_format {
        ReportFormat::Csv => {
            write_solve_report(&report, &trace_path, ReportFormat::Csv).runtime()?
        }
        ReportFormat::Json => write_json(&report.trace, &trace_path).runtime()?,
    }

    if let Some(message) = failure {
        return Err(Failure::Runtime(anyhow!(
            "{algorithm} failed after {} iterations: {message} (partial report in {})",
            report.iterations_total,
            report_path.display()
        )));
    }

    println!("algorithm: {algorithm}");
    println!("psi: {:.5}", report.cost);
    let stages: Vec<String> = report
        .iterations_per_stage
        .iter()
        .map(usize::to_string)
        .collect();
    println!(
        "iterations: {} (per stage {})",
        report.iterations_total,
        stages.join(";")
    );
    println!("termination: {:?}", report.termination);
    for (l, row) in report.final_x.row_iter().enumerate() {
        let coords: Vec<String> = row.iter().map(|v| format!("{v:.5}")).collect();
        println!("center {}: {}", l + 1, coords.join(" "));
    }
    println!("report: {}", report_path.display());
    Ok(())
}

pub fn bench(path: &Path, opts: &GlobalOpts) -> Outcome {
    let loaded = config::load(path).config()?;
    let instance = loaded.instance(loaded.dataset().config()?).config()?;
    let b = loaded.bench().config()?;
    let spec = ExperimentSpec {
        name: loaded.stem.clone(),
        algorithms: b.algorithms.clone(),
        restarts: b.restarts,
        base_seed: opts.seed.unwrap_or(b.base_seed),
        settings: loaded.config.solver.settings(),
        warmup: b.warmup,
    };
    spec.validate().config()?;
    let out = Output::new(&loaded, opts);

    let res = run_experiment(&instance, &spec).runtime()?;
    let records = res.records();
    if opts.deterministic_order {
        assert!(records.windows(2).all(|w| w[0].run_id <= w[1].run_id));
    }
    let csv = out.file("bench.csv")?;
    write_bench_table(&records, &csv, ReportFormat::Csv).runtime()?;
    let summary = out.file("summary.json")?;
    write_json(&res.summary, &summary).runtime()?;

    println!(
        "experiment: {} ({} restarts, {} failed rows)",
        spec.name, spec.restarts, res.summary.failed_rows
    );
    for a in &res.summary.algorithms {
        println!(
            "{:<14} psi mean {:.5}  iterations mean {:.1}  time mean {:.6}s (std {:.6}s)",
            a.algorithm.name(),
            a.cost.mean,
            a.iterations.mean,
            a.wall_time_s.mean,
            a.wall_time_s.std
        );
    }
    for r in &res.summary.ratios {
        println!(
            "{}/{}: iteration ratio mean {:.3} median {:.3}; time ratio mean {:.3} median {:.3}",
            r.baseline,
            r.contender,
            r.iteration_ratio.mean,
            r.iteration_ratio.median,
            r.time_ratio.mean,
            r.time_ratio.median
        );
    }
    println!("table: {}", csv.display());
    println!("summary: {}", summary.display());
    Ok(())
}

/// Flat CSV view of a [`ScalingRow`].
#[derive(Serialize)]
struct ScalingCsvRow {
    model: String,
    dim: usize,
    n: usize,
    baseline: String,
    contender: String,
    rows_ok: usize,
    rows_failed: usize,
    iteration_ratio_mean: f64,
    iteration_ratio_median: f64,
    iteration_ratio_std: f64,
    time_ratio_mean: f64,
    time_ratio_median: f64,
    time_ratio_std: f64,
    baseline_time_mean_s: f64,
    baseline_time_std_s: f64,
    contender_time_mean_s: f64,
    contender_time_std_s: f64,
}

impl From<&ScalingRow> for ScalingCsvRow {
    fn from(r: &ScalingRow) -> Self {
        ScalingCsvRow {
            model: serde_json::to_value(r.model)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            dim: r.dim,
            n: r.n,
            baseline: r.baseline.to_string(),
            contender: r.contender.to_string(),
            rows_ok: r.rows_ok,
            rows_failed: r.rows_failed,
            iteration_ratio_mean: r.iteration_ratio.mean,
            iteration_ratio_median: r.iteration_ratio.median,
            iteration_ratio_std: r.iteration_ratio.std,
            time_ratio_mean: r.time_ratio.mean,
            time_ratio_median: r.time_ratio.median,
            time_ratio_std: r.time_ratio.std,
            baseline_time_mean_s: r.baseline_time_s.mean,
            baseline_time_std_s: r.baseline_time_s.std,
            contender_time_mean_s: r.contender_time_s.mean,
            contender_time_std_s: r.contender_time_s.std,
        }
    }
}

pub fn scaling(path: &Path, opts: &GlobalOpts) -> Outcome {
    let loaded = config::load(path).config()?;
    let mut spec = loaded.scaling().config()?;
    if let Some(s) = opts.seed {
        spec.base_seed = s;
    }
    let out = Output::new(&loaded, opts);
    let rows = run_scaling(&spec).runtime()?;

    let csv = out.file("scaling.csv")?;
    let mut w = csv::Writer::from_path(&csv).runtime()?;
    for r in &rows {
        w.serialize(ScalingCsvRow::from(r)).runtime()?;
    }
    w.flush().runtime()?;
    let json = out.file("scaling.json")?;
    write_json(&rows, &json).runtime()?;

    for r in &rows {
        println!(
            "dim {:>2} n {:>6} {}/{}: iteration ratio median {:.3}, time ratio median {:.3} ({} ok, {} failed)",
            r.dim, r.n, r.baseline, r.contender, r.iteration_ratio.median, r.time_ratio.median, r.rows_ok, r.rows_failed
        );
    }
    println!("table: {}", csv.display());
    Ok(())
}

pub fn generate(path: &Path, opts: &GlobalOpts) -> Outcome {
    let loaded = config::load(path).config()?;
    let mut spec = loaded.random_spec().config()?;
    if let Some(s) = opts.seed {
        spec.seed = s;
    }
    let data = dcclust::io::generate_uniform(spec).config()?;
    let out = Output::new(&loaded, opts);
    let file = out.file("points.csv")?;
    write_points_csv(data.points().expect("generator yields points"), &file).runtime()?;
    println!(
        "wrote {} points in dimension {} to {}",
        spec.n,
        spec.dim,
        file.display()
    );
    Ok(())
}
