use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::{Dataset, DatasetContent};

/// `n` points drawn uniformly from the half-open box `[low, high)^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub dim: usize,
    pub low: f64,
    pub high: f64,
    pub seed: u64,
}

pub fn generate_uniform(spec: RandomSpec) -> Result<Dataset> {
    let RandomSpec {
        n,
        dim,
        low,
        high,
        seed,
    } = spec;
    if n == 0 || dim == 0 {
        return Err(Error::InvalidParameter(format!(
            "need n > 0 and dim > 0, got n = {n}, dim = {dim}"
        )));
    }
    if !low.is_finite() || !high.is_finite() || low >= high {
        return Err(Error::InvalidParameter(format!(
            "bounds must satisfy low < high, got [{low}, {high})"
        )));
    }
    let dist = Uniform::new(low, high)
        .map_err(|e| Error::InvalidParameter(format!("bad bounds [{low}, {high}): {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = dist.sample_iter(&mut rng).take(n * dim).collect();
    Ok(Dataset {
        content: DatasetContent::Points {
            points: Mat::from_vec(n, dim, data)?,
        },
        labels: None,
        source: format!("uniform n={n} dim={dim} [{low}, {high}) seed={seed}"),
    })
}
