//! Dense pairwise dissimilarity matrices and read-only index-mapped views.

use crate::error::Error;

/// Read access to a square table of pairwise dissimilarities.
///
/// All algorithms in this crate consume their data exclusively through this
/// trait, which lets CLARA-style subsampling and benchmark permutations reuse
/// one shared [`DissimilarityMatrix`] without copying.
pub trait Dissimilarity {
    /// Number of points.
    fn len(&self) -> usize;

    /// Dissimilarity between points `i` and `j`.
    fn get(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense row-major n×n dissimilarity matrix.
///
/// Immutable after construction; safe to share across concurrent runs.
/// Symmetry, a zero diagonal and nonnegativity are enforced at construction.
/// The triangle inequality is *not* required.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Build from a row-major buffer of length `n*n`.
    ///
    /// Rejects `n < 2`, nonzero diagonals, negative or non-finite entries,
    /// and asymmetry beyond `1e-12 * max(1, d)`.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 points, got {n}"
            )));
        }
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values for n={}, got {}",
                n * n,
                n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({i},{i}) is {}, must be 0",
                    values[i * n + i]
                )));
            }
            for j in 0..n {
                let d = values[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) is {d}, must be finite and nonnegative"
                    )));
                }
                let dt = values[j * n + i];
                if (d - dt).abs() > 1e-12 * d.abs().max(1.0) {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entries ({i},{j})={d} vs ({j},{i})={dt}"
                    )));
                }
            }
        }
        Ok(Self { n, values })
    }

    /// Build from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, Error> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
        }
        Self::from_values(n, rows.iter().flatten().copied().collect())
    }

    /// Pairwise metric matrix from coordinate vectors.
    pub fn from_points(points: &[Vec<f64>], metric: Metric) -> Result<Self, Error> {
        let n = points.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!(
                "need at least 2 points, got {n}"
            )));
        }
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.eval(&points[i], &points[j]);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self::from_values(n, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Dissimilarity for DissimilarityMatrix {
    #[inline]
    fn len(&self) -> usize {
        self.n
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

impl<M: Dissimilarity + ?Sized> Dissimilarity for &M {
    #[inline]
    fn len(&self) -> usize {
        (**self).len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        (**self).get(i, j)
    }
}

/// View of a matrix restricted to a subset of points (CLARA subsamples).
///
/// Index `i` of the view refers to point `indices[i]` of the base matrix.
pub struct SubsetView<'a, M: Dissimilarity> {
    base: &'a M,
    indices: Vec<usize>,
}

impl<'a, M: Dissimilarity> SubsetView<'a, M> {
    pub fn new(base: &'a M, indices: Vec<usize>) -> Self {
        debug_assert!(indices.iter().all(|&i| i < base.len()));
        Self { base, indices }
    }

    /// Map a view-local index back to the base matrix.
    pub fn to_base(&self, i: usize) -> usize {
        self.indices[i]
    }
}

impl<M: Dissimilarity> Dissimilarity for SubsetView<'_, M> {
    #[inline]
    fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.base.get(self.indices[i], self.indices[j])
    }
}

/// Point metrics for building matrices from coordinate data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Manhattan,
    SquaredEuclidean,
}

impl Metric {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::SquaredEuclidean => {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
            }
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_and_malformed() {
        assert!(DissimilarityMatrix::from_values(1, vec![0.0]).is_err());
        assert!(DissimilarityMatrix::from_values(2, vec![0.0; 3]).is_err());
        // nonzero diagonal
        assert!(DissimilarityMatrix::from_values(2, vec![1.0, 2.0, 2.0, 0.0]).is_err());
        // negative entry
        assert!(DissimilarityMatrix::from_values(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
        // asymmetry
        assert!(DissimilarityMatrix::from_values(2, vec![0.0, 1.0, 2.0, 0.0]).is_err());
    }

    #[test]
    fn accepts_symmetric() {
        let m = DissimilarityMatrix::from_values(2, vec![0.0, 3.0, 3.0, 0.0]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn metric_values() {
        let a = [0.0, 0.0];
        let b = [3.0, 4.0];
        assert_eq!(Metric::Euclidean.eval(&a, &b), 5.0);
        assert_eq!(Metric::SquaredEuclidean.eval(&a, &b), 25.0);
        assert_eq!(Metric::Manhattan.eval(&a, &b), 7.0);
    }

    #[test]
    fn subset_view_maps_indices() {
        let m = DissimilarityMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 3.0],
            vec![2.0, 3.0, 0.0],
        ])
        .unwrap();
        let v = SubsetView::new(&m, vec![2, 0]);
        assert_eq!(v.len(), 2);
        assert_eq!(v.get(0, 1), 2.0);
        assert_eq!(v.to_base(0), 2);
    }
}
