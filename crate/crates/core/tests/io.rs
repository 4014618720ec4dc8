mod common;

use dcclust::io::{
    generate_uniform, load_cities_csv, load_points_csv, load_tsplib, read_bench_csv,
    write_bench_table, write_points_csv, write_solve_report, BenchRecord, RandomSpec, ReportFormat,
};
use dcclust::solver::{dca_solve, PenaltySchedule, StopRule};
use dcclust::{ClusteringProblemF64, ConstraintSystemF64, ConvexSet, Error};

use common::data_dir;

// Sums frozen from a separate whitespace-split parse of the same file.
#[test]
fn eil76_checksum() {
    let d = load_tsplib(data_dir().join("eil76.tsp")).unwrap();
    let p = d.points().unwrap();
    assert_eq!(p.shape(), (76, 2));
    let sx: f64 = p.row_iter().map(|r| r[0]).sum();
    let sy: f64 = p.row_iter().map(|r| r[1]).sum();
    let sq: f64 = p.as_slice().iter().map(|v| v * v).sum();
    assert_eq!((sx, sy, sq), (2984.0, 2791.0, 270373.0));
    assert_eq!(p.row(0), &[22.0, 22.0]);
    assert_eq!(p.row(75), &[40.0, 40.0]);

    let text = std::fs::read_to_string(data_dir().join("eil76.tsp")).unwrap();
    let body = text
        .split("NODE_COORD_SECTION")
        .nth(1)
        .unwrap()
        .split("EOF")
        .next()
        .unwrap();
    let nums: Vec<f64> = body
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    for (i, chunk) in nums.chunks(3).enumerate() {
        assert_eq!(p.row(chunk[0] as usize - 1), &chunk[1..], "node {i}");
    }
}

#[test]
fn cities_fixture() {
    let d = load_cities_csv(data_dir().join("us_cities_50.csv"), 0.1).unwrap();
    assert_eq!(d.len(), 50);
    let labels = d.labels.as_ref().unwrap();
    assert_eq!(labels[0], "New York");
    match &d.sets().unwrap()[0] {
        ConvexSet::Ball { center, radius } => {
            assert_eq!(center, &vec![-73.9385, 40.6643]);
            assert!((radius - 0.1 * (302.6 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(
        load_tsplib("/nonexistent/x.tsp"),
        Err(Error::Io(_))
    ));
}

#[test]
fn generated_points_round_trip_through_csv() {
    let spec = RandomSpec {
        n: 200,
        dim: 4,
        low: 0.0,
        high: 10.0,
        seed: 3,
    };
    let d = generate_uniform(spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    write_points_csv(d.points().unwrap(), &a).unwrap();
    write_points_csv(generate_uniform(spec).unwrap().points().unwrap(), &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(load_points_csv(&a).unwrap().points(), d.points());
}

#[test]
fn bench_csv_round_trip() {
    let recs: Vec<BenchRecord> = (0..5)
        .map(|i| BenchRecord {
            run_id: i,
            seed: 100 + i as u64,
            algorithm: ["dca", "bdca"][i % 2].into(),
            iterations_total: 10 * i + 1,
            wall_time_s: 1.0 / (3.0 + i as f64),
            final_cost: 33576.25344 + i as f64 / 7.0,
            stages: vec![i, 2, 1],
        })
        .collect();
    let f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
    write_bench_table(&recs, f.path(), ReportFormat::Csv).unwrap();
    assert_eq!(read_bench_csv(f.path()).unwrap(), recs);
}

#[test]
fn solve_report_json_and_trace_csv() {
    let d = load_tsplib(data_dir().join("eil76.tsp")).unwrap();
    let p = ClusteringProblemF64::new(
        d.points().unwrap().clone(),
        ConstraintSystemF64::unconstrained(2, 2).unwrap(),
    )
    .unwrap();
    let x0 = dcclust::MatF64::from_rows(&[[30.0, 50.0], [40.0, 20.0]]).unwrap();
    let sched = PenaltySchedule::new(1.0, 10.0, 1e8).unwrap();
    let report = dca_solve(&p, &x0, &sched, &StopRule::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let json = dir.path().join("r.json");
    write_solve_report(&report, &json, ReportFormat::Json).unwrap();
    let back: dcclust::SolveReportF64 =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back.final_x, report.final_x);
    assert_eq!(back.cost.to_bits(), report.cost.to_bits());

    let csv = dir.path().join("r.csv");
    write_solve_report(&report, &csv, ReportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("stage,iteration,tau,objective_before,objective,"));
    assert_eq!(text.lines().count(), report.trace.len() + 1);
}
