//! Closed convex sets with closed-form Euclidean projection.
//!
//! Every other module reaches geometry through this one: the penalty terms use
//! [`ConvexSet::dist_sq`], the DCA updates use [`ConvexSet::project`], and the
//! benchmark harness draws starting centers with [`ConvexSet::sample_uniform`].
//!
//! Intersections are deliberately not a set kind. A center constrained to
//! `Ω₁ ∩ Ω₂` carries both sets and the penalty handles each one separately.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Default membership tolerance for [`ConvexSet::contains`].
pub const DEFAULT_CONTAINS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "SetSpec<T>",
    into = "SetSpec<T>",
    bound(
        serialize = "T: Scalar + Serialize",
        deserialize = "T: Scalar + Deserialize<'de>"
    )
)]
pub enum ConvexSet<T> {
    /// Closed ball `{x : ‖x − center‖ ≤ radius}`.
    Ball {
        center: Vec<T>,
        radius: T,
    },
    /// Axis-aligned box `lower ≤ x ≤ upper`.
    Box {
        lower: Vec<T>,
        upper: Vec<T>,
    },
    /// `{x : ⟨normal, x⟩ ≤ offset}`.
    Halfspace {
        normal: Vec<T>,
        offset: T,
    },
    WholeSpace {
        dim: usize,
    },
}

/// Wire form of a set descriptor, validated on conversion.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec<T> {
    Ball { center: Vec<T>, radius: T },
    Box { lower: Vec<T>, upper: Vec<T> },
    Halfspace { normal: Vec<T>, offset: T },
    WholeSpace { dim: usize },
}

impl<T: Scalar> TryFrom<SetSpec<T>> for ConvexSet<T> {
    type Error = Error;

    fn try_from(spec: SetSpec<T>) -> Result<Self> {
        match spec {
            SetSpec::Ball { center, radius } => ConvexSet::ball(center, radius),
            SetSpec::Box { lower, upper } => ConvexSet::bounding_box(lower, upper),
            SetSpec::Halfspace { normal, offset } => ConvexSet::halfspace(normal, offset),
            SetSpec::WholeSpace { dim } => ConvexSet::whole_space(dim),
        }
    }
}

impl<T> From<ConvexSet<T>> for SetSpec<T> {
    fn from(set: ConvexSet<T>) -> Self {
        match set {
            ConvexSet::Ball { center, radius } => SetSpec::Ball { center, radius },
            ConvexSet::Box { lower, upper } => SetSpec::Box { lower, upper },
            ConvexSet::Halfspace { normal, offset } => SetSpec::Halfspace { normal, offset },
            ConvexSet::WholeSpace { dim } => SetSpec::WholeSpace { dim },
        }
    }
}

fn all_finite<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl<T: Scalar> ConvexSet<T> {
    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        if center.is_empty() || !all_finite(&center) {
            return Err(Error::InvalidSet(
                "ball center must be a finite, non-empty vector".into(),
            ));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidSet(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    /// Axis-aligned box. Named to avoid shadowing `Box`.
    pub fn bounding_box(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidSet(format!(
                "box bounds must be non-empty and of equal length ({} vs {})",
                lower.len(),
                upper.len()
            )));
        }
        if !all_finite(&lower) || !all_finite(&upper) {
            return Err(Error::InvalidSet("box bounds must be finite".into()));
        }
        if let Some(j) = (0..lower.len()).find(|&j| lower[j] > upper[j]) {
            return Err(Error::InvalidSet(format!(
                "box lower bound exceeds upper bound in coordinate {j}"
            )));
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    pub fn halfspace(normal: Vec<T>, offset: T) -> Result<Self> {
        if normal.is_empty() || !all_finite(&normal) || !offset.is_finite() {
            return Err(Error::InvalidSet(
                "halfspace data must be finite and non-empty".into(),
            ));
        }
        if scalar::norm_sq(&normal) == T::zero() {
            return Err(Error::InvalidSet("halfspace normal must be nonzero".into()));
        }
        Ok(ConvexSet::Halfspace { normal, offset })
    }

    pub fn whole_space(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSet(
                "whole space needs a positive dimension".into(),
            ));
        }
        Ok(ConvexSet::WholeSpace { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
            ConvexSet::WholeSpace { dim } => *dim,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::Box { .. } => "box",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::WholeSpace { .. } => "whole_space",
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, ConvexSet::Ball { .. } | ConvexSet::Box { .. })
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Euclidean projection of `x` onto the set.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        let mut out = vec![T::zero(); x.len()];
        self.project_into(x, &mut out);
        Ok(out)
    }

    /// Squared Euclidean distance from `x` to the set.
    pub fn dist_sq(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(self.dist_sq_unchecked(x))
    }

    /// `dist(x, S) ≤ tol`.
    pub fn contains(&self, x: &[T], tol: T) -> Result<bool> {
        Ok(self.dist_sq(x)? <= tol * tol)
    }

    /// `φ_S(x) = sup_{w∈S} 2⟨x,w⟩ − ‖w‖²`, attained at `w = P(x; S)`.
    ///
    /// Satisfies `‖x‖² − φ_S(x) = dist(x, S)²` and `∇φ_S(x) = 2 P(x; S)`.
    pub fn phi_support(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        Ok(self.phi_unchecked(x))
    }

    /// Draws a point uniformly from a bounded set.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<T>> {
        match self {
            ConvexSet::Box { lower, upper } => Ok(lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| {
                    let u: f64 = rng.random();
                    lo + (hi - lo) * T::lit(u)
                })
                .collect()),
            ConvexSet::Ball { center, radius } => {
                let d = center.len();
                let dir: Vec<f64> = loop {
                    let g: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
                    if g.iter().map(|v| v * v).sum::<f64>() > 1e-24 {
                        break g;
                    }
                };
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
                let u: f64 = rng.random();
                let rho = u.powf(1.0 / d as f64);
                Ok(center
                    .iter()
                    .zip(&dir)
                    .map(|(&c, &g)| c + *radius * T::lit(rho * g / norm))
                    .collect())
            }
            ConvexSet::Halfspace { .. } => Err(Error::UnsupportedSampling("halfspace")),
            ConvexSet::WholeSpace { .. } => Err(Error::UnsupportedSampling("whole space")),
        }
    }

    /// Projection without the dimension check. `out` must have length `dim()`.
    pub(crate) fn project_into(&self, x: &[T], out: &mut [T]) {
        match self {
            ConvexSet::Ball { center, radius } => {
                let dsq = scalar::dist_sq(x, center);
                if dsq <= *radius * *radius {
                    out.copy_from_slice(x);
                } else {
                    let s = *radius / dsq.sqrt();
                    for ((o, &xi), &ci) in out.iter_mut().zip(x).zip(center) {
                        *o = ci + s * (xi - ci);
                    }
                }
            }
            ConvexSet::Box { lower, upper } => {
                for (((o, &xi), &lo), &hi) in out.iter_mut().zip(x).zip(lower).zip(upper) {
                    *o = xi.max(lo).min(hi);
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = scalar::dot(normal, x) - *offset;
                if excess <= T::zero() {
                    out.copy_from_slice(x);
                } else {
                    let t = excess / scalar::norm_sq(normal);
                    for ((o, &xi), &ai) in out.iter_mut().zip(x).zip(normal) {
                        *o = xi - t * ai;
                    }
                }
            }
            ConvexSet::WholeSpace { .. } => out.copy_from_slice(x),
        }
    }

    pub(crate) fn dist_sq_unchecked(&self, x: &[T]) -> T {
        match self {
            ConvexSet::Ball { center, radius } => {
                let gap = scalar::dist_sq(x, center).sqrt() - *radius;
                if gap > T::zero() {
                    gap * gap
                } else {
                    T::zero()
                }
            }
            ConvexSet::Box { lower, upper } => x
                .iter()
                .zip(lower)
                .zip(upper)
                .map(|((&xi, &lo), &hi)| {
                    let e = if xi < lo {
                        lo - xi
                    } else if xi > hi {
                        xi - hi
                    } else {
                        T::zero()
                    };
                    e * e
                })
                .sum(),
            ConvexSet::Halfspace { normal, offset } => {
                let excess = scalar::dot(normal, x) - *offset;
                if excess > T::zero() {
                    excess * excess / scalar::norm_sq(normal)
                } else {
                    T::zero()
                }
            }
            ConvexSet::WholeSpace { .. } => T::zero(),
        }
    }

    pub(crate) fn phi_unchecked(&self, x: &[T]) -> T {
        let mut w = vec![T::zero(); x.len()];
        self.project_into(x, &mut w);
        T::lit(2.0) * scalar::dot(x, &w) - scalar::norm_sq(&w)
    }
}
