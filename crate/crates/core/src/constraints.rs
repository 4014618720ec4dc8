use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::sets::ConvexSet;

/// Per-center lists of constraint sets `Ω_j^ℓ`, padded to a common length `q`
/// with whole-space entries (zero penalty, identity projection).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct ConstraintSystem<T> {
    dim: usize,
    sets: Vec<Vec<ConvexSet<T>>>,
    /// Number of user-supplied sets per center before padding.
    supplied: Vec<usize>,
}

impl<T: Scalar> ConstraintSystem<T> {
    pub fn new(dim: usize, per_center: Vec<Vec<ConvexSet<T>>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if per_center.is_empty() {
            return Err(Error::InvalidParameter("need at least one center".into()));
        }
        for list in &per_center {
            for s in list {
                if s.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: s.dim(),
                    });
                }
            }
        }
        let q = per_center.iter().map(Vec::len).max().unwrap_or(0);
        let supplied = per_center.iter().map(Vec::len).collect();
        let sets = per_center
            .into_iter()
            .map(|mut list| {
                list.resize(q, ConvexSet::WholeSpace { dim });
                list
            })
            .collect();
        Ok(Self {
            dim,
            sets,
            supplied,
        })
    }

    /// `k` centers with no constraints.
    pub fn unconstrained(dim: usize, k: usize) -> Result<Self> {
        Self::new(dim, vec![Vec::new(); k])
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    pub fn q(&self) -> usize {
        self.sets.first().map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self, l: usize) -> &[ConvexSet<T>] {
        &self.sets[l]
    }

    pub fn supplied(&self, l: usize) -> &[ConvexSet<T>] {
        &self.sets[l][..self.supplied[l]]
    }

    /// `Σ_ℓ Σ_j dist(x^ℓ, Ω_j^ℓ)²`
    pub(crate) fn penalty(&self, x: &Mat<T>) -> T {
        self.sets
            .iter()
            .enumerate()
            .map(|(l, list)| {
                let row = x.row(l);
                list.iter().map(|s| s.dist_sq_unchecked(row)).sum::<T>()
            })
            .sum()
    }

    /// `Σ_ℓ Σ_j φ_{Ω_j^ℓ}(x^ℓ)`
    pub(crate) fn phi_sum(&self, x: &Mat<T>) -> T {
        self.sets
            .iter()
            .enumerate()
            .map(|(l, list)| {
                let row = x.row(l);
                list.iter().map(|s| s.phi_unchecked(row)).sum::<T>()
            })
            .sum()
    }

    /// Matrix `U` whose row `ℓ` is `Σ_j P(x^ℓ; Ω_j^ℓ)`.
    pub(crate) fn projection_sum(&self, x: &Mat<T>) -> Mat<T> {
        let mut u = Mat::zeros(x.rows(), x.cols());
        let mut buf = vec![T::zero(); self.dim];
        for (l, list) in self.sets.iter().enumerate() {
            let row = x.row(l);
            let acc = u.row_mut(l);
            for s in list {
                s.project_into(row, &mut buf);
                for (a, &b) in acc.iter_mut().zip(&buf) {
                    *a += b;
                }
            }
        }
        u
    }

    /// Whether every center lies in all of its sets within `tol`.
    pub fn is_feasible(&self, x: &Mat<T>, tol: T) -> Result<bool> {
        if x.shape() != (self.k(), self.dim) {
            return Err(Error::ShapeMismatch {
                expected: (self.k(), self.dim),
                found: x.shape(),
            });
        }
        Ok(self.penalty(x) <= tol * tol)
    }

    /// Initial centers: row `ℓ` drawn uniformly from the first set of center `ℓ`.
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Mat<T>> {
        let mut x = Mat::zeros(self.k(), self.dim);
        for l in 0..self.k() {
            let first = self.supplied(l).first().ok_or_else(|| {
                Error::InvalidParameter(format!("center {l} has no constraint set to sample from"))
            })?;
            let p = first.sample_uniform(rng)?;
            x.row_mut(l).copy_from_slice(&p);
        }
        Ok(x)
    }
}
