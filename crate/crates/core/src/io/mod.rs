//! Dataset ingestion and result serialization.

mod cities;
mod points;
mod random;
mod report;
mod tsplib;

use serde::{Deserialize, Serialize};

use crate::matrix::Mat;
use crate::sets::ConvexSet;

pub use cities::{city_radius, load_cities_csv, CityRecord};
pub use points::{load_points_csv, write_points_csv};
pub use random::{generate_uniform, RandomSpec};
pub use report::{
    read_bench_csv, write_bench_table, write_json, write_solve_report, BenchRecord, ReportFormat,
};
pub use tsplib::{load_tsplib, parse_tsplib};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetContent {
    Points { points: Mat<f64> },
    Sets { sets: Vec<ConvexSet<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub content: DatasetContent,
    pub labels: Option<Vec<String>>,
    /// Where the data came from (file path or generator description).
    pub source: String,
}

impl Dataset {
    pub fn len(&self) -> usize {
        match &self.content {
            DatasetContent::Points { points } => points.rows(),
            DatasetContent::Sets { sets } => sets.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match &self.content {
            DatasetContent::Points { points } => points.cols(),
            DatasetContent::Sets { sets } => sets.first().map_or(0, ConvexSet::dim),
        }
    }

    pub fn points(&self) -> Option<&Mat<f64>> {
        match &self.content {
            DatasetContent::Points { points } => Some(points),
            DatasetContent::Sets { .. } => None,
        }
    }

    pub fn sets(&self) -> Option<&[ConvexSet<f64>]> {
        match &self.content {
            DatasetContent::Sets { sets } => Some(sets),
            DatasetContent::Points { .. } => None,
        }
    }

    /// Replaces every point by a ball of the given radius around it.
    pub fn into_balls(self, radius: f64) -> crate::Result<Dataset> {
        match self.content {
            DatasetContent::Sets { .. } => Ok(self),
            DatasetContent::Points { points } => {
                let sets = points
                    .row_iter()
                    .map(|r| ConvexSet::ball(r.to_vec(), radius))
                    .collect::<crate::Result<Vec<_>>>()?;
                Ok(Dataset {
                    content: DatasetContent::Sets { sets },
                    labels: self.labels,
                    source: format!("{} (balls of radius {radius})", self.source),
                })
            }
        }
    }
}
