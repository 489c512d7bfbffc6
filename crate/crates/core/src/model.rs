//! The data model and reference semantics: total deviation, medoids,
//! the per-point assignment cache and the literal four-case swap oracle.
//!
//! Everything here is written for clarity, not speed; the optimizers in
//! [`crate::optimize`] are tested against these definitions.

use crate::error::{Error, Result};
use crate::matrix::Dissimilarity;

/// Ordered set of k distinct point indices acting as cluster centers.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MedoidSet {
    indices: Vec<usize>,
}

impl MedoidSet {
    /// Validate against a matrix of `n` points: distinct, in range, `1 <= k < n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        let k = indices.len();
        if k < 1 || k >= n {
            return Err(Error::InvalidMedoids(format!(
                "k must satisfy 1 <= k < n, got k={k}, n={n}"
            )));
        }
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::InvalidMedoids(format!(
                    "index {i} out of range for n={n}"
                )));
            }
            if seen[i] {
                return Err(Error::InvalidMedoids(format!("duplicate index {i}")));
            }
            seen[i] = true;
        }
        Ok(Self { indices })
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, point: usize) -> bool {
        self.indices.contains(&point)
    }

    /// Replace the medoid in `slot` by `candidate` (no validation).
    pub(crate) fn set(&mut self, slot: usize, candidate: usize) {
        self.indices[slot] = candidate;
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }
}

/// Per-point nearest / second-nearest medoid slots and distances.
///
/// Invariants (restored after every swap):
/// - `d_nearest[o] <= d_second[o]` and both equal the exact matrix entries,
/// - `nearest[o] != second[o]`,
/// - ties between equal distances resolve to the smaller medoid slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentCache {
    /// Slot (position within the `MedoidSet`) of the closest medoid.
    pub nearest: Vec<usize>,
    pub d_nearest: Vec<f64>,
    /// Slot of the second-closest medoid.
    pub second: Vec<usize>,
    pub d_second: Vec<f64>,
}

impl AssignmentCache {
    pub fn len(&self) -> usize {
        self.nearest.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nearest.is_empty()
    }
}

/// Outcome of one clustering run.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ClusteringResult {
    pub medoids: MedoidSet,
    /// Per-point medoid slot.
    pub assignment: Vec<usize>,
    /// Total deviation of `medoids`.
    pub loss: f64,
    /// Outer passes performed.
    pub n_iterations: usize,
    /// Swaps (or medoid updates) executed.
    pub n_swaps: usize,
    /// Executed swaps as (medoid slot, candidate point) in order.
    pub swap_trace: Vec<(usize, usize)>,
    /// False when the iteration cap was hit before convergence.
    pub converged: bool,
    /// Seconds spent in the optimizer.
    pub wall_time: f64,
}

/// Per-medoid loss of removal: `ΔTD^{-m_i} = Σ_{nearest(o)=i} d_second(o) - d_nearest(o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalLossTable(pub Vec<f64>);

/// Sum of dissimilarities of every point to its closest medoid.
///
/// Summation runs in ascending point order so results are reproducible.
pub fn total_deviation<M: Dissimilarity>(matrix: &M, medoids: &MedoidSet) -> f64 {
    let mut td = 0.0;
    for o in 0..matrix.len() {
        let mut dn = f64::INFINITY;
        for &m in medoids.indices() {
            let d = matrix.get(o, m);
            if d < dn {
                dn = d;
            }
        }
        td += dn;
    }
    td
}

/// The member of `members` with the smallest sum of dissimilarities to the
/// others; ties break to the smallest point index.
pub fn medoid_of_set<M: Dissimilarity>(matrix: &M, members: &[usize]) -> Result<usize> {
    if members.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut best = usize::MAX;
    let mut best_sum = f64::INFINITY;
    for &cand in members {
        let sum: f64 = members.iter().map(|&o| matrix.get(o, cand)).sum();
        if sum < best_sum || (sum == best_sum && cand < best) {
            best_sum = sum;
            best = cand;
        }
    }
    Ok(best)
}

/// Compute the nearest/second-nearest cache for `medoids`.
///
/// Requires `k >= 2`; the `k = 1` problem is solved exactly by
/// [`medoid_of_set`] instead. Equal distances assign to the smaller slot.
pub fn assign_nearest<M: Dissimilarity>(
    matrix: &M,
    medoids: &MedoidSet,
) -> Result<AssignmentCache> {
    if medoids.k() < 2 {
        return Err(Error::NeedTwoMedoids);
    }
    let n = matrix.len();
    let mut cache = AssignmentCache {
        nearest: vec![0; n],
        d_nearest: vec![0.0; n],
        second: vec![0; n],
        d_second: vec![0.0; n],
    };
    for o in 0..n {
        update_point(matrix, medoids, &mut cache, o);
    }
    Ok(cache)
}

/// Recompute the cache entries of a single point by a full scan over slots.
#[inline]
fn update_point<M: Dissimilarity>(
    matrix: &M,
    medoids: &MedoidSet,
    cache: &mut AssignmentCache,
    o: usize,
) {
    let mut n1 = 0usize;
    let mut d1 = f64::INFINITY;
    let mut n2 = 0usize;
    let mut d2 = f64::INFINITY;
    for (slot, &m) in medoids.indices().iter().enumerate() {
        let d = matrix.get(o, m);
        if d < d1 {
            n2 = n1;
            d2 = d1;
            n1 = slot;
            d1 = d;
        } else if d < d2 {
            n2 = slot;
            d2 = d;
        }
    }
    cache.nearest[o] = n1;
    cache.d_nearest[o] = d1;
    cache.second[o] = n2;
    cache.d_second[o] = d2;
}

/// The literal four-case per-object contribution to a swap's ΔTD.
///
/// `d_oc` is the distance of the object to the candidate; `nearest_is_i`
/// tells whether the object is currently assigned to the medoid being
/// replaced; `dn`/`ds` are the cached nearest/second-nearest distances.
#[inline]
pub fn change(d_oc: f64, nearest_is_i: bool, dn: f64, ds: f64) -> f64 {
    if nearest_is_i {
        if d_oc < ds {
            d_oc - dn // (b1): stays with the new medoid
        } else {
            ds - dn // (b2): reassigned to the second nearest
        }
    } else if d_oc < dn {
        d_oc - dn // (c): moves to the new medoid
    } else {
        0.0 // (a): unaffected
    }
}

/// Change in total deviation from swapping the medoid in `medoid_slot` with
/// `candidate`, evaluated literally by the four cases over all objects.
///
/// This is the reference oracle every fast algorithm is tested against.
pub fn swap_delta_oracle<M: Dissimilarity>(
    matrix: &M,
    medoids: &MedoidSet,
    cache: &AssignmentCache,
    medoid_slot: usize,
    candidate: usize,
) -> Result<f64> {
    if medoids.contains(candidate) {
        return Err(Error::CandidateIsMedoid(candidate));
    }
    let mut delta = 0.0;
    for o in 0..matrix.len() {
        delta += change(
            matrix.get(o, candidate),
            cache.nearest[o] == medoid_slot,
            cache.d_nearest[o],
            cache.d_second[o],
        );
    }
    Ok(delta)
}

/// The three-term decomposition of the change function: removal loss of the
/// medoid, gain of adding the candidate, and a correction term. Equals
/// [`change`] for every object; used as an algebraic cross-check.
#[inline]
pub fn change_decomposed(d_oc: f64, nearest_is_i: bool, dn: f64, ds: f64) -> f64 {
    let removal = if nearest_is_i { ds - dn } else { 0.0 };
    let addition = if d_oc < dn { d_oc - dn } else { 0.0 };
    let correction = if nearest_is_i {
        if d_oc < dn {
            dn - ds
        } else if d_oc < ds {
            d_oc - ds
        } else {
            0.0
        }
    } else {
        0.0
    };
    removal + addition + correction
}

/// Execute a swap and restore the cache, identical to [`assign_nearest`]
/// from scratch.
pub fn apply_swap<M: Dissimilarity>(
    matrix: &M,
    medoids: &mut MedoidSet,
    cache: &mut AssignmentCache,
    medoid_slot: usize,
    candidate: usize,
) -> Result<()> {
    if medoids.contains(candidate) {
        return Err(Error::CandidateIsMedoid(candidate));
    }
    medoids.set(medoid_slot, candidate);
    for o in 0..matrix.len() {
        update_point(matrix, medoids, cache, o);
    }
    Ok(())
}

/// One pass over the points accumulating `ΔTD^{-m_i}` per medoid slot.
pub fn removal_loss(cache: &AssignmentCache, k: usize) -> RemovalLossTable {
    let mut table = vec![0.0; k];
    for o in 0..cache.len() {
        table[cache.nearest[o]] += cache.d_second[o] - cache.d_nearest[o];
    }
    RemovalLossTable(table)
}
