//! Helpers shared by the integration tests: random small instances and a
//! finite-difference oracle that only looks at function values.
#![allow(dead_code)]

use std::path::PathBuf;

use dcclust::bench::Instance;
use dcclust::{
    ClusteringProblemF64, ConstraintSystemF64, ConvexSetF64, MatF64, SetClusteringProblemF64,
};
use rand::Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn random_point<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn random_set<R: Rng>(rng: &mut R, d: usize) -> ConvexSetF64 {
    match rng.random_range(0..3) {
        0 => {
            ConvexSetF64::ball(random_point(rng, d, 0.0, 10.0), rng.random_range(0.2..3.0)).unwrap()
        }
        1 => {
            let lo = random_point(rng, d, 0.0, 8.0);
            let hi = lo.iter().map(|v| v + rng.random_range(0.1..3.0)).collect();
            ConvexSetF64::bounding_box(lo, hi).unwrap()
        }
        _ => {
            let mut n = random_point(rng, d, -1.0, 1.0);
            n[0] += 0.5f64.copysign(n[0]);
            ConvexSetF64::halfspace(n, rng.random_range(-2.0..8.0)).unwrap()
        }
    }
}

pub fn random_constraints<R: Rng>(rng: &mut R, d: usize, k: usize) -> ConstraintSystemF64 {
    let per_center = (0..k)
        .map(|_| {
            (0..rng.random_range(0..=2))
                .map(|_| random_set(rng, d))
                .collect()
        })
        .collect();
    ConstraintSystemF64::new(d, per_center).unwrap()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: f64, hi: f64) -> MatF64 {
    MatF64::from_vec(rows, cols, random_point(rng, rows * cols, lo, hi)).unwrap()
}

/// Clustering with `m ≤ 20`, `k ≤ 4`, `d ≤ 3`.
pub fn random_clustering<R: Rng>(rng: &mut R) -> ClusteringProblemF64 {
    let (m, k, d) = (
        rng.random_range(1..=20),
        rng.random_range(1..=4),
        rng.random_range(1..=3),
    );
    let data = random_matrix(rng, m, d, 0.0, 10.0);
    ClusteringProblemF64::new(data, random_constraints(rng, d, k)).unwrap()
}

/// Set clustering with `m ≤ 20`, `k ≤ 4`, `d ≤ 3`; targets are balls and boxes.
pub fn random_set_clustering<R: Rng>(rng: &mut R) -> SetClusteringProblemF64 {
    let (m, k, d) = (
        rng.random_range(1..=20),
        rng.random_range(1..=4),
        rng.random_range(1..=3),
    );
    let targets = (0..m)
        .map(|_| loop {
            let s = random_set(rng, d);
            if s.is_bounded() {
                break s;
            }
        })
        .collect();
    SetClusteringProblemF64::new(targets, random_constraints(rng, d, k)).unwrap()
}

pub fn random_instance<R: Rng>(rng: &mut R, set_model: bool) -> Instance {
    if set_model {
        Instance::SetClustering(random_set_clustering(rng))
    } else {
        Instance::Clustering(random_clustering(rng))
    }
}

/// `(g, h)` of either model.
pub fn g_h(inst: &Instance, x: &MatF64, tau: f64) -> (f64, f64) {
    match inst {
        Instance::Clustering(p) => p.eval_g_h(x, tau).unwrap(),
        Instance::SetClustering(p) => p.eval_g_h(x, tau).unwrap(),
    }
}

/// Central differences of a scalar function of a matrix.
pub fn numeric_gradient(f: impl Fn(&MatF64) -> f64, x: &MatF64, step: f64) -> MatF64 {
    let mut grad = MatF64::zeros(x.rows(), x.cols());
    let mut probe = x.clone();
    for i in 0..x.as_slice().len() {
        let v = x.as_slice()[i];
        probe.as_mut_slice()[i] = v + step;
        let up = f(&probe);
        probe.as_mut_slice()[i] = v - step;
        let down = f(&probe);
        probe.as_mut_slice()[i] = v;
        grad.as_mut_slice()[i] = (up - down) / (2.0 * step);
    }
    grad
}

/// Minimizes `g(·) − ⟨y, ·⟩` by gradient descent with Armijo backtracking,
/// using only values of `g`.
pub fn numeric_subproblem_min(g: impl Fn(&MatF64) -> f64, y: &MatF64, start: &MatF64) -> MatF64 {
    let obj = |z: &MatF64| g(z) - z.inner(y);
    let mut x = start.clone();
    let mut step = 1.0;
    let stop = 1e-9 * (1.0 + y.frobenius());
    for _ in 0..10_000 {
        let grad = numeric_gradient(obj, &x, 1e-3);
        let gn = grad.frobenius_sq();
        if gn.sqrt() < stop {
            break;
        }
        let fx = obj(&x);
        step *= 4.0;
        loop {
            let cand = x.add_scaled(-step, &grad);
            if obj(&cand) <= fx - 0.5 * step * gn {
                x = cand;
                break;
            }
            step *= 0.5;
            if step < 1e-14 {
                // rounding noise dominates the gradient: x is as good as it gets
                return x;
            }
        }
    }
    x
}
