//! Plain point files: a header row (`x1,x2,…`) followed by one point per row.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::{Dataset, DatasetContent};

pub fn load_points_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let dim = reader.headers()?.len();
    if dim == 0 {
        return Err(Error::parse(&origin, 1, "empty header"));
    }
    let mut data = Vec::new();
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(&origin, line, e.to_string())
        })?;
        let line = rec.position().map_or(rows + 2, |p| p.line() as usize);
        if rec.len() != dim {
            return Err(Error::parse(
                &origin,
                line,
                format!("expected {dim} fields, got {}", rec.len()),
            ));
        }
        for field in rec.iter() {
            let v = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(&origin, line, format!("bad number `{field}`")))?;
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::parse(&origin, 1, "no points found"));
    }
    Ok(Dataset {
        content: DatasetContent::Points {
            points: Mat::from_vec(rows, dim, data)?,
        },
        labels: None,
        source: origin,
    })
}

/// Writes points with shortest round-trip float formatting.
pub fn write_points_csv(points: &Mat<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record((1..=points.cols()).map(|j| format!("x{j}")))?;
    for row in points.row_iter() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
