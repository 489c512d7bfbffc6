//! Brute-force reference routines: exact optimum by enumeration and
//! exhaustive local-optimality verification.
//!
//! These are deliberately independent of the incremental machinery in
//! [`crate::optimize`]; tests and the bundled benchmark suite rely on them.

use crate::error::Result;
use crate::matrix::Dissimilarity;
use crate::model::{assign_nearest, swap_delta_oracle, MedoidSet};

/// Exact optimum over all C(n, k) medoid sets.
///
/// Enumerates combinations in lexicographic order with an incrementally
/// maintained nearest-distance array per prefix. Feasible for desk-scale
/// instances only (roughly C(n, k) up to a few hundred million).
pub fn brute_force_optimum<M: Dissimilarity>(matrix: &M, k: usize) -> (Vec<usize>, f64) {
    let n = matrix.len();
    assert!(k >= 1 && k < n, "need 1 <= k < n");
    let mut best = (Vec::new(), f64::INFINITY);
    let mut chosen = Vec::with_capacity(k);
    // dn[depth] holds nearest distances given the first `depth` medoids
    let init: Vec<f64> = vec![f64::INFINITY; n];
    let mut stack: Vec<Vec<f64>> = vec![init; k + 1];
    descend(matrix, k, 0, &mut chosen, &mut stack, &mut best);
    best
}

fn descend<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    first: usize,
    chosen: &mut Vec<usize>,
    stack: &mut Vec<Vec<f64>>,
    best: &mut (Vec<usize>, f64),
) {
    let n = matrix.len();
    let depth = chosen.len();
    let remaining = k - depth;
    for c in first..=(n - remaining) {
        // split stack to copy dn[depth] into dn[depth+1] updated with c
        let (lo, hi) = stack.split_at_mut(depth + 1);
        let prev = &lo[depth];
        let next = &mut hi[0];
        let mut td = 0.0;
        for o in 0..n {
            let d = matrix.get(o, c).min(prev[o]);
            next[o] = d;
            td += d;
        }
        if remaining == 1 {
            if td < best.1 {
                let mut meds = chosen.clone();
                meds.push(c);
                *best = (meds, td);
            }
        } else {
            chosen.push(c);
            descend(matrix, k, c + 1, chosen, stack, best);
            chosen.pop();
        }
    }
}

/// True when no single medoid/non-medoid exchange has strictly negative ΔTD,
/// checked exhaustively over all k·(n−k) pairs with the four-case oracle.
pub fn is_local_optimum<M: Dissimilarity>(matrix: &M, medoids: &MedoidSet) -> Result<bool> {
    let cache = assign_nearest(matrix, medoids)?;
    for slot in 0..medoids.k() {
        for candidate in 0..matrix.len() {
            if medoids.contains(candidate) {
                continue;
            }
            if swap_delta_oracle(matrix, medoids, &cache, slot, candidate)? < 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
