//! Result files. Floats go through `ryu`/`serde_json`, both of which emit the
//! shortest representation that parses back to the same `f64`.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::solver::SolveReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

/// One solver run in a benchmark table.
///
/// `stages` holds the per-stage iteration counts; in CSV it is a single
/// `;`-separated field. A failed run has `final_cost = NaN`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub run_id: usize,
    pub seed: u64,
    pub algorithm: String,
    pub iterations_total: usize,
    pub wall_time_s: f64,
    pub final_cost: f64,
    #[serde(serialize_with = "join_counts", deserialize_with = "split_counts")]
    pub stages: Vec<usize>,
}

fn join_counts<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    let joined: Vec<String> = v.iter().map(usize::to_string).collect();
    s.serialize_str(&joined.join(";"))
}

fn split_counts<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<usize>, D::Error> {
    let s = String::deserialize(d)?;
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|p| p.trim().parse::<usize>().map_err(serde::de::Error::custom))
        .collect()
}

pub fn write_json<V: Serialize + ?Sized>(value: &V, path: impl AsRef<Path>) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(w, value)?;
    Ok(())
}

pub fn write_bench_table(
    records: &[BenchRecord],
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(records, path),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn read_bench_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize()
        .map(|rec| {
            rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::parse(&origin, line, e.to_string())
            })
        })
        .collect()
}

/// JSON writes the whole report; CSV writes the per-iteration trace.
pub fn write_solve_report<T: Scalar + Serialize>(
    report: &SolveReport<T>,
    path: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(report, path),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            for t in &report.trace {
                w.serialize(t)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> Vec<BenchRecord> {
        vec![
            BenchRecord {
                run_id: 0,
                seed: 42,
                algorithm: "dca".into(),
                iterations_total: 123,
                wall_time_s: 0.1 + 0.2,
                final_cost: 33576.253436918,
                stages: vec![100, 20, 3],
            },
            BenchRecord {
                run_id: 1,
                seed: 43,
                algorithm: "bdca-adaptive".into(),
                iterations_total: 0,
                wall_time_s: 1e-9,
                final_cost: f64::NAN,
                stages: vec![],
            },
        ]
    }

    #[test]
    fn csv_round_trip_and_header() {
        let f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        let recs = records();
        write_bench_table(&recs, f.path(), ReportFormat::Csv).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert!(text
            .starts_with("run_id,seed,algorithm,iterations_total,wall_time_s,final_cost,stages\n"));
        assert!(text.contains("100;20;3"));
        let back = read_bench_csv(f.path()).unwrap();
        assert_eq!(back[0], recs[0]);
        assert_eq!(back[0].wall_time_s.to_bits(), recs[0].wall_time_s.to_bits());
        assert!(back[1].final_cost.is_nan());
        assert!(back[1].stages.is_empty());
    }

    #[test]
    fn json_table() {
        let f = tempfile::NamedTempFile::new().unwrap();
        write_bench_table(&records()[..1], f.path(), ReportFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_reader(File::open(f.path()).unwrap()).unwrap();
        assert_eq!(v[0]["stages"], "100;20;3");
        assert_eq!(v[0]["final_cost"].as_f64().unwrap(), 33576.253436918);
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(
            ReportFormat::from_path(Path::new("a/b.csv")),
            Some(ReportFormat::Csv)
        );
        assert_eq!(
            ReportFormat::from_path(Path::new("b.json")),
            Some(ReportFormat::Json)
        );
        assert_eq!(ReportFormat::from_path(Path::new("b.txt")), None);
    }
}
