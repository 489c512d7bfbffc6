//! Seeded generators for synthetic test and benchmark data.

use crate::matrix::{DissimilarityMatrix, Metric};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Manhattan distances between 1-D points.
pub fn manhattan_1d(points: &[f64]) -> DissimilarityMatrix {
    let n = points.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            values[i * n + j] = (points[i] - points[j]).abs();
        }
    }
    DissimilarityMatrix::from_values(n, values).unwrap()
}

/// Symmetric matrix of uniform random integer distances in `1..=max_value`.
///
/// Integer-valued inputs keep floating-point sums exact, so oracle
/// comparisons can assert equality rather than tolerances.
pub fn random_integer_matrix<R: Rng>(
    n: usize,
    max_value: u32,
    rng: &mut R,
) -> DissimilarityMatrix {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.random_range(1..=max_value) as f64;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DissimilarityMatrix::from_values(n, values).unwrap()
}

/// `n` points drawn from `n_centers` Gaussian blobs in `dim` dimensions.
pub fn gaussian_blobs(
    n: usize,
    dim: usize,
    n_centers: usize,
    spread: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..n_centers)
        .map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect();
    (0..n)
        .map(|i| {
            let c = &centers[i % n_centers];
            c.iter().map(|&x| x + spread * gauss(&mut rng)).collect()
        })
        .collect()
}

/// Matrix over Gaussian blob points; convenience for benchmarks.
pub fn blob_matrix(n: usize, dim: usize, n_centers: usize, seed: u64) -> DissimilarityMatrix {
    let points = gaussian_blobs(n, dim, n_centers, 0.5, seed);
    DissimilarityMatrix::from_points(&points, Metric::Euclidean).unwrap()
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Random connected undirected graph with `n` vertices, about `m` edges and
/// integer costs in `1..=max_cost`, emitted as edge list (1-based vertices).
pub fn random_connected_graph<R: Rng>(
    n: usize,
    m: usize,
    max_cost: u32,
    rng: &mut R,
) -> Vec<(usize, usize, u64)> {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    // random spanning tree first
    let mut order: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for w in 1..n {
        let u = order[rng.random_range(0..w)];
        let v = order[w];
        let (a, b) = (u.min(v), u.max(v));
        seen.insert((a, b));
        edges.push((a, b, rng.random_range(1..=max_cost) as u64));
    }
    while edges.len() < m {
        let a = rng.random_range(1..=n);
        let b = rng.random_range(1..=n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            edges.push((key.0, key.1, rng.random_range(1..=max_cost) as u64));
        }
    }
    edges
}
