use dcclust::bench::{
    run_experiment, run_scaling, scaling_constraints, Algorithm, ExperimentSpec, Instance,
    ScalingModel, ScalingSpec, SolverSettings, Stats,
};
use dcclust::{ClusteringProblemF64, ConstraintSystemF64, ConvexSetF64, MatF64};

fn small_instance() -> Instance {
    let data =
        MatF64::from_rows(&[[0.0, 0.0], [1.0, 1.0], [8.0, 8.0], [9.0, 7.0], [4.0, 6.0]]).unwrap();
    let cs = ConstraintSystemF64::new(
        2,
        vec![
            vec![ConvexSetF64::ball(vec![1.0, 1.0], 1.0).unwrap()],
            vec![ConvexSetF64::bounding_box(vec![6.0, 6.0], vec![9.0, 9.0]).unwrap()],
        ],
    )
    .unwrap();
    Instance::Clustering(ClusteringProblemF64::new(data, cs).unwrap())
}

fn spec(algorithms: Vec<Algorithm>, restarts: usize) -> ExperimentSpec {
    ExperimentSpec {
        name: "small".into(),
        algorithms,
        restarts,
        base_seed: 10,
        settings: SolverSettings::default(),
        warmup: 0,
    }
}

#[test]
fn single_dca_row_has_no_ratios() {
    let res = run_experiment(&small_instance(), &spec(vec![Algorithm::Dca], 1)).unwrap();
    assert_eq!(res.rows.len(), 1);
    assert!(res.rows[0].ratios.is_empty());
    assert!(res.summary.ratios.is_empty());
    assert_eq!(res.rows[0].seed, 10);
}

#[test]
fn duplicate_algorithm_gives_identical_columns() {
    let res = run_experiment(
        &small_instance(),
        &spec(vec![Algorithm::Bdca, Algorithm::Bdca], 5),
    )
    .unwrap();
    for row in &res.rows {
        assert_eq!(row.runs[0].final_x, row.runs[1].final_x);
        assert_eq!(
            row.runs[0].iterations_per_stage,
            row.runs[1].iterations_per_stage
        );
        assert_eq!(row.ratios[0].iteration_ratio, 1.0);
    }
}

type Stripped = Vec<(u64, u64, Vec<usize>, Vec<Option<MatF64>>)>;

fn strip_times(mut res: dcclust::bench::ExperimentResult) -> Stripped {
    res.rows
        .drain(..)
        .map(|r| {
            (
                r.seed,
                r.x0_digest,
                r.runs.iter().map(|x| x.iterations_total).collect(),
                r.runs.into_iter().map(|x| x.final_x).collect(),
            )
        })
        .collect()
}

#[test]
fn rows_do_not_depend_on_thread_count() {
    let s = spec(Algorithm::ALL.to_vec(), 16);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one
        .install(|| run_experiment(&small_instance(), &s))
        .unwrap();
    let b = four
        .install(|| run_experiment(&small_instance(), &s))
        .unwrap();
    let seeds: Vec<u64> = a.rows.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, (10..26).collect::<Vec<_>>());
    assert_eq!(strip_times(a), strip_times(b));
}

#[test]
fn paired_rows_share_the_initial_point() {
    let res = run_experiment(&small_instance(), &spec(Algorithm::ALL.to_vec(), 4)).unwrap();
    let digests: std::collections::HashSet<u64> = res.rows.iter().map(|r| r.x0_digest).collect();
    assert_eq!(digests.len(), 4);
    for row in &res.rows {
        assert_eq!(row.ratios.len(), 2);
        for r in &row.ratios {
            assert!(r.iteration_ratio.is_finite() && r.iteration_ratio > 0.0);
            assert!(r.time_ratio.is_finite() && r.time_ratio > 0.0);
        }
        let costs: Vec<f64> = row.runs.iter().map(|r| r.cost).collect();
        assert!(costs
            .iter()
            .all(|c| (c - costs[0]).abs() <= 1e-3 * costs[0]));
    }
    assert_eq!(res.records().len(), 12);
}

#[test]
fn failing_solves_mark_rows_without_aborting() {
    let data = MatF64::from_rows(&[[1e300, 1e300], [0.0, 0.0]]).unwrap();
    let cs = ConstraintSystemF64::new(
        2,
        vec![vec![ConvexSetF64::ball(vec![0.0, 0.0], 1.0).unwrap()]],
    )
    .unwrap();
    let inst = Instance::Clustering(ClusteringProblemF64::new(data, cs).unwrap());
    let res = run_experiment(&inst, &spec(vec![Algorithm::Dca, Algorithm::Bdca], 3)).unwrap();
    assert_eq!(res.rows.len(), 3);
    assert_eq!(res.summary.failed_rows, 3);
    assert!(res.rows.iter().all(|r| r.failed() && r.ratios.is_empty()));
    assert!(res.records().iter().all(|r| r.final_cost.is_nan()));
    assert_eq!(res.summary.ratios[0].iteration_ratio.n, 0);
}

#[test]
fn invalid_specs_are_rejected() {
    assert!(run_experiment(&small_instance(), &spec(vec![Algorithm::Dca], 0)).is_err());
    assert!(run_experiment(&small_instance(), &spec(vec![], 3)).is_err());
    let mut s = spec(vec![Algorithm::Bdca], 1);
    s.settings.beta = 1.5;
    assert!(run_experiment(&small_instance(), &s).is_err());
    assert!("bdca-fast".parse::<Algorithm>().is_err());
    assert_eq!(
        "bdca-adaptive".parse::<Algorithm>().unwrap(),
        Algorithm::BdcaAdaptive
    );
}

#[test]
fn scaling_templates() {
    let c = scaling_constraints(ScalingModel::Clustering, 2).unwrap();
    let centers: Vec<Vec<f64>> = c
        .iter()
        .map(|sets| match &sets[0] {
            ConvexSetF64::Ball { center, radius } => {
                assert_eq!(*radius, 1.0);
                center.clone()
            }
            other => panic!("{other:?}"),
        })
        .collect();
    assert_eq!(
        centers,
        vec![vec![1.0, 5.0], vec![6.0, 4.0], vec![8.0, 8.0]]
    );
    let c5 = scaling_constraints(ScalingModel::Clustering, 5).unwrap();
    assert_eq!(
        c5[0][0],
        ConvexSetF64::ball(vec![1.0, 5.0, 1.0, 5.0, 1.0], 1.0).unwrap()
    );

    let s = scaling_constraints(ScalingModel::SetClustering, 2).unwrap();
    assert_eq!(s.len(), 4);
    assert_eq!(s[0][0], ConvexSetF64::ball(vec![1.0, 5.0], 1.0).unwrap());
    assert_eq!(s[0][1], ConvexSetF64::ball(vec![2.0, 6.0], 1.0).unwrap());
    assert!(scaling_constraints(ScalingModel::SetClustering, 11).is_err());
}

#[test]
fn scaling_sweep_is_long_format() {
    let mut spec = ScalingSpec::new(ScalingModel::SetClustering, vec![2, 3], vec![50]);
    spec.restarts = 3;
    spec.warmup = 1;
    let rows = run_scaling(&spec).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r.baseline == Algorithm::Dca && r.rows_ok == 3));
    assert_eq!(rows[0].dim, 2);
    assert_eq!(rows[3].contender, Algorithm::BdcaAdaptive);
}

#[test]
fn stats_basics() {
    let s = Stats::of(&[1.0, 2.0, 3.0, 10.0]);
    assert_eq!(
        (s.n, s.mean, s.median, s.min, s.max),
        (4, 4.0, 2.5, 1.0, 10.0)
    );
    assert!((s.std - 4.08248290463863).abs() < 1e-12);
    assert!(Stats::of(&[]).mean.is_nan());
}
