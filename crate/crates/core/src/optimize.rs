//! Swap-based refinement: PAM SWAP, FastPAM1, EagerPAM, FasterPAM, and the
//! alternating heuristic.
//!
//! All optimizers share one global tie rule (smaller medoid slot, then
//! smaller candidate index), which makes the PAM / FastPAM1 swap traces
//! comparable pair by pair.

use crate::error::Result;
use crate::matrix::Dissimilarity;
use crate::model::{
    apply_swap, assign_nearest, change, medoid_of_set, removal_loss, total_deviation,
    AssignmentCache, ClusteringResult, MedoidSet, RemovalLossTable,
};
use std::time::Instant;

/// Selectable swap-based optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptAlgorithm {
    Pam,
    FastPam1,
    EagerPam,
    FasterPam,
    Alternating,
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: OptAlgorithm,
    /// Cap on outer passes.
    pub max_iterations: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: OptAlgorithm::FasterPam,
            max_iterations: 2000,
        }
    }
}

impl OptimizerConfig {
    pub fn new(algorithm: OptAlgorithm) -> Self {
        Self {
            algorithm,
            max_iterations: 2000,
        }
    }
}

/// Run the configured optimizer from the given initial medoids.
pub fn optimize<M: Dissimilarity>(
    matrix: &M,
    medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    match config.algorithm {
        OptAlgorithm::Pam => pam_swap(matrix, medoids, config),
        OptAlgorithm::FastPam1 => fastpam1_swap(matrix, medoids, config),
        OptAlgorithm::EagerPam => eager_pam_swap(matrix, medoids, config),
        OptAlgorithm::FasterPam => fasterpam_swap(matrix, medoids, config),
        OptAlgorithm::Alternating => alternating(matrix, medoids, config),
    }
}

struct RunState {
    td: f64,
    n_iterations: usize,
    n_swaps: usize,
    trace: Vec<(usize, usize)>,
    converged: bool,
    started: Instant,
}

impl RunState {
    fn new(td: f64) -> Self {
        Self {
            td,
            n_iterations: 0,
            n_swaps: 0,
            trace: Vec::new(),
            converged: false,
            started: Instant::now(),
        }
    }

    fn finish<M: Dissimilarity>(
        self,
        matrix: &M,
        medoids: MedoidSet,
        cache: &AssignmentCache,
    ) -> ClusteringResult {
        debug_assert!(td_close(self.td, total_deviation(matrix, &medoids)));
        ClusteringResult {
            assignment: cache.nearest.clone(),
            loss: total_deviation(matrix, &medoids),
            medoids,
            n_iterations: self.n_iterations,
            n_swaps: self.n_swaps,
            swap_trace: self.trace,
            converged: self.converged,
            wall_time: self.started.elapsed().as_secs_f64(),
        }
    }
}

fn td_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

/// Original PAM SWAP: steepest descent over all k·(n−k) exchanges, executing
/// the single best strictly negative one per iteration.
pub fn pam_swap<M: Dissimilarity>(
    matrix: &M,
    mut medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    let n = matrix.len();
    let k = medoids.k();
    let mut cache = assign_nearest(matrix, &medoids)?;
    let mut state = RunState::new(total_deviation(matrix, &medoids));
    let mut is_med = medoid_flags(&medoids, n);
    loop {
        state.n_iterations += 1;
        let mut best = (0.0f64, usize::MAX, usize::MAX);
        for slot in 0..k {
            for candidate in 0..n {
                if is_med[candidate] {
                    continue;
                }
                let mut delta = 0.0;
                for o in 0..n {
                    delta += change(
                        matrix.get(o, candidate),
                        cache.nearest[o] == slot,
                        cache.d_nearest[o],
                        cache.d_second[o],
                    );
                }
                if delta < best.0 {
                    best = (delta, slot, candidate);
                }
            }
        }
        if best.0 >= 0.0 {
            state.converged = true;
            break;
        }
        execute(matrix, &mut medoids, &mut cache, &mut is_med, best, &mut state)?;
        if state.n_iterations >= config.max_iterations {
            break;
        }
    }
    Ok(state.finish(matrix, medoids, &cache))
}

/// FastPAM1: the same steepest-descent swaps as [`pam_swap`], but each
/// candidate is scored for all k medoids in a single pass over the points
/// using the removal-loss table and a shared accumulator.
pub fn fastpam1_swap<M: Dissimilarity>(
    matrix: &M,
    mut medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    let n = matrix.len();
    let k = medoids.k();
    let mut cache = assign_nearest(matrix, &medoids)?;
    let mut state = RunState::new(total_deviation(matrix, &medoids));
    let mut is_med = medoid_flags(&medoids, n);
    let mut deltas = vec![0.0f64; k];
    loop {
        state.n_iterations += 1;
        let removal = removal_loss(&cache, k);
        let mut best = (0.0f64, usize::MAX, usize::MAX);
        for candidate in 0..n {
            if is_med[candidate] {
                continue;
            }
            let (slot, delta) = best_slot_for(matrix, &cache, &removal, candidate, &mut deltas);
            // smaller slot wins on equal delta so the swap trace matches PAM
            if delta < best.0 || (delta == best.0 && slot < best.1) {
                best = (delta, slot, candidate);
            }
        }
        if best.0 >= 0.0 {
            state.converged = true;
            break;
        }
        execute(matrix, &mut medoids, &mut cache, &mut is_med, best, &mut state)?;
        if state.n_iterations >= config.max_iterations {
            break;
        }
    }
    Ok(state.finish(matrix, medoids, &cache))
}

/// One pass over all points for a fixed candidate: returns the best medoid
/// slot to replace and its total ΔTD (removal loss + shared accumulator +
/// per-medoid corrections).
#[inline]
pub(crate) fn best_slot_for<M: Dissimilarity>(
    matrix: &M,
    cache: &AssignmentCache,
    removal: &RemovalLossTable,
    candidate: usize,
    deltas: &mut [f64],
) -> (usize, f64) {
    deltas.copy_from_slice(&removal.0);
    let mut shared = 0.0;
    for o in 0..cache.len() {
        let d_oc = matrix.get(o, candidate);
        let dn = cache.d_nearest[o];
        let ds = cache.d_second[o];
        if d_oc < dn {
            shared += d_oc - dn;
            deltas[cache.nearest[o]] += dn - ds;
        } else if d_oc < ds {
            deltas[cache.nearest[o]] += d_oc - ds;
        }
    }
    let mut slot = 0;
    for (s, &d) in deltas.iter().enumerate() {
        if d < deltas[slot] {
            slot = s;
        }
    }
    (slot, deltas[slot] + shared)
}

/// EagerPAM: PAM's loop order (medoid slots outer, candidates inner) with
/// first-improvement descent; any strictly negative swap is executed
/// immediately. Converges after a full improvement-free pass.
pub fn eager_pam_swap<M: Dissimilarity>(
    matrix: &M,
    mut medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    let n = matrix.len();
    let k = medoids.k();
    let mut cache = assign_nearest(matrix, &medoids)?;
    let mut state = RunState::new(total_deviation(matrix, &medoids));
    let mut is_med = medoid_flags(&medoids, n);
    loop {
        state.n_iterations += 1;
        let mut improved = false;
        for slot in 0..k {
            for candidate in 0..n {
                if is_med[candidate] {
                    continue;
                }
                let mut delta = 0.0;
                for o in 0..n {
                    delta += change(
                        matrix.get(o, candidate),
                        cache.nearest[o] == slot,
                        cache.d_nearest[o],
                        cache.d_second[o],
                    );
                }
                if delta < 0.0 {
                    execute(
                        matrix,
                        &mut medoids,
                        &mut cache,
                        &mut is_med,
                        (delta, slot, candidate),
                        &mut state,
                    )?;
                    improved = true;
                }
            }
        }
        if !improved {
            state.converged = true;
            break;
        }
        if state.n_iterations >= config.max_iterations {
            break;
        }
    }
    Ok(state.finish(matrix, medoids, &cache))
}

/// FasterPAM: FastPAM1 scoring with eager swapping. Scans candidates in
/// ascending point order (wrapping), swaps with the best of the k slots
/// whenever beneficial, and terminates when the scan returns to the last
/// swap position without further improvement.
pub fn fasterpam_swap<M: Dissimilarity>(
    matrix: &M,
    mut medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    let n = matrix.len();
    let k = medoids.k();
    let mut cache = assign_nearest(matrix, &medoids)?;
    let mut state = RunState::new(total_deviation(matrix, &medoids));
    let mut is_med = medoid_flags(&medoids, n);
    let mut removal = removal_loss(&cache, k);
    let mut deltas = vec![0.0f64; k];
    let mut x_last: Option<usize> = None;
    'outer: loop {
        state.n_iterations += 1;
        let mut swapped = false;
        for candidate in 0..n {
            // the sentinel check precedes the medoid check: the last swapped
            // point is a medoid now, and reaching its index means one full
            // improvement-free cycle
            if x_last == Some(candidate) {
                state.converged = true;
                break 'outer;
            }
            if is_med[candidate] {
                continue;
            }
            let (slot, delta) = best_slot_for(matrix, &cache, &removal, candidate, &mut deltas);
            if delta < 0.0 {
                execute(
                    matrix,
                    &mut medoids,
                    &mut cache,
                    &mut is_med,
                    (delta, slot, candidate),
                    &mut state,
                )?;
                removal = removal_loss(&cache, k);
                x_last = Some(candidate);
                swapped = true;
            }
        }
        if x_last.is_none() && !swapped {
            state.converged = true;
            break;
        }
        if state.n_iterations >= config.max_iterations {
            break;
        }
    }
    Ok(state.finish(matrix, medoids, &cache))
}

/// The k-means style heuristic: alternate nearest-medoid assignment and
/// per-cluster medoid recomputation until no medoid changes. Empty clusters
/// keep their medoid. Works for `k = 1` as well.
pub fn alternating<M: Dissimilarity>(
    matrix: &M,
    medoids: MedoidSet,
    config: &OptimizerConfig,
) -> Result<ClusteringResult> {
    let n = matrix.len();
    let k = medoids.k();
    let mut meds = medoids.into_indices();
    let started = Instant::now();
    let mut n_iterations = 0;
    let mut n_swaps = 0;
    let mut trace = Vec::new();
    let mut converged = false;
    loop {
        n_iterations += 1;
        let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
        for o in 0..n {
            let mut slot = 0;
            for s in 1..k {
                if matrix.get(o, meds[s]) < matrix.get(o, meds[slot]) {
                    slot = s;
                }
            }
            clusters[slot].push(o);
        }
        let mut changed = false;
        for (slot, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let m = medoid_of_set(matrix, members)?;
            if m != meds[slot] && !meds.contains(&m) {
                meds[slot] = m;
                trace.push((slot, m));
                n_swaps += 1;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
        if n_iterations >= config.max_iterations {
            break;
        }
    }
    let medoids = MedoidSet::new(meds, n)?;
    let assignment: Vec<usize> = (0..n)
        .map(|o| {
            let mut slot = 0;
            for s in 1..k {
                if matrix.get(o, medoids.indices()[s]) < matrix.get(o, medoids.indices()[slot]) {
                    slot = s;
                }
            }
            slot
        })
        .collect();
    Ok(ClusteringResult {
        loss: total_deviation(matrix, &medoids),
        medoids,
        assignment,
        n_iterations,
        n_swaps,
        swap_trace: trace,
        converged,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn medoid_flags(medoids: &MedoidSet, n: usize) -> Vec<bool> {
    let mut flags = vec![false; n];
    for &m in medoids.indices() {
        flags[m] = true;
    }
    flags
}

/// Execute one accepted swap and keep all incrementally tracked state in step.
fn execute<M: Dissimilarity>(
    matrix: &M,
    medoids: &mut MedoidSet,
    cache: &mut AssignmentCache,
    is_med: &mut [bool],
    (delta, slot, candidate): (f64, usize, usize),
    state: &mut RunState,
) -> Result<()> {
    debug_assert!(delta < 0.0, "accepted swaps must strictly decrease TD");
    let old = medoids.indices()[slot];
    apply_swap(matrix, medoids, cache, slot, candidate)?;
    is_med[old] = false;
    is_med[candidate] = true;
    state.td += delta;
    state.n_swaps += 1;
    state.trace.push((slot, candidate));
    debug_assert!(
        td_close(state.td, total_deviation(matrix, medoids)),
        "incremental TD diverged from recomputation"
    );
    Ok(())
}
