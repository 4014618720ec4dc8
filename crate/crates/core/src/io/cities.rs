use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sets::ConvexSet;

use super::{Dataset, DatasetContent};

/// One row of the city CSV: `name,longitude,latitude,area_sq_miles`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct CityRecord {
    pub name: String,
    pub longitude: f64,
    pub latitude: f64,
    pub area_sq_miles: f64,
}

/// `scale · √(area / π)`: the radius of a disc with the city's area, scaled.
pub fn city_radius(area_sq_miles: f64, scale: f64) -> f64 {
    scale * (area_sq_miles / PI).sqrt()
}

/// Loads cities as balls centered at `(longitude, latitude)`.
pub fn load_cities_csv(path: impl AsRef<Path>, radius_scale: f64) -> Result<Dataset> {
    if !(radius_scale > 0.0) || !radius_scale.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius scale must be positive, got {radius_scale}"
        )));
    }
    let path = path.as_ref();
    let origin = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;

    let headers = reader.headers()?.clone();
    for col in ["name", "longitude", "latitude", "area_sq_miles"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::parse(&origin, 1, format!("missing column `{col}`")));
        }
    }

    let mut sets = Vec::new();
    let mut labels = Vec::new();
    for rec in reader.deserialize::<CityRecord>() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(&origin, line, e.to_string())
        })?;
        let line = sets.len() + 2;
        if !(rec.area_sq_miles > 0.0) || !rec.area_sq_miles.is_finite() {
            return Err(Error::parse(
                &origin,
                line,
                format!(
                    "area of {} must be positive, got {}",
                    rec.name, rec.area_sq_miles
                ),
            ));
        }
        if !rec.longitude.is_finite() || !rec.latitude.is_finite() {
            return Err(Error::parse(
                &origin,
                line,
                format!("non-finite coordinates for {}", rec.name),
            ));
        }
        let r = city_radius(rec.area_sq_miles, radius_scale);
        sets.push(ConvexSet::ball(vec![rec.longitude, rec.latitude], r)?);
        labels.push(rec.name);
    }
    if sets.is_empty() {
        return Err(Error::parse(&origin, 1, "no cities found"));
    }
    Ok(Dataset {
        content: DatasetContent::Sets { sets },
        labels: Some(labels),
        source: origin,
    })
}
