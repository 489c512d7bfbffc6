//! Subsampling approximations: CLARA, FastCLARA, CLARANS, FastCLARANS.
//!
//! CLARA runs build + swap on subsamples and judges medoids by their
//! full-data total deviation; CLARANS explores random swap edges. All four
//! are deterministic functions of (matrix, k, seed). Subsample runs reuse
//! the global matrix through an index-mapping view rather than copying.

use crate::error::{Error, Result};
use crate::init::init_build;
use crate::matrix::{Dissimilarity, SubsetView};
use crate::model::{
    apply_swap, assign_nearest, removal_loss, swap_delta_oracle, total_deviation,
    ClusteringResult, MedoidSet,
};
use crate::optimize::{optimize, OptAlgorithm, OptimizerConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// How the CLARA subsample size is derived from n and k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleSizeRule {
    /// 40 + 2k, the original recommendation.
    Classic,
    /// 80 + 4k, suited to the faster swap.
    Doubled,
    /// ceil(sqrt(n)) + 4k.
    Sqrt,
}

impl SampleSizeRule {
    pub fn resolve(self, n: usize, k: usize) -> usize {
        let s = match self {
            SampleSizeRule::Classic => 40 + 2 * k,
            SampleSizeRule::Doubled => 80 + 4 * k,
            SampleSizeRule::Sqrt => (n as f64).sqrt().ceil() as usize + 4 * k,
        };
        s.max(k + 1).min(n)
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ClaraConfig {
    /// Number of independent subsample draws.
    pub n_samples: usize,
    pub sample_size_rule: SampleSizeRule,
    pub inner: OptimizerConfig,
    pub seed: u64,
}

impl ClaraConfig {
    /// Original CLARA: 5 samples of 40+2k, PAM inside.
    pub fn classic(seed: u64) -> Self {
        Self {
            n_samples: 5,
            sample_size_rule: SampleSizeRule::Classic,
            inner: OptimizerConfig::new(OptAlgorithm::Pam),
            seed,
        }
    }

    /// FastCLARA: 5 samples of 80+4k, FasterPAM inside.
    pub fn fast(seed: u64) -> Self {
        Self {
            n_samples: 5,
            sample_size_rule: SampleSizeRule::Doubled,
            inner: OptimizerConfig::new(OptAlgorithm::FasterPam),
            seed,
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ClaransConfig {
    /// Independent restarts from random medoids.
    pub num_local: usize,
    /// Attempt budget as a fraction of the neighborhood size: k·(n−k) swap
    /// edges for CLARANS, (n−k) candidates for FastCLARANS.
    pub max_neighbor_fraction: f64,
    pub seed: u64,
}

impl ClaransConfig {
    pub fn classic(seed: u64) -> Self {
        Self {
            num_local: 2,
            max_neighbor_fraction: 0.0125,
            seed,
        }
    }

    pub fn fast(seed: u64) -> Self {
        Self {
            num_local: 2,
            max_neighbor_fraction: 0.025,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_neighbor_fraction > 0.0 && self.max_neighbor_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "max_neighbor_fraction must be in (0,1], got {}",
                self.max_neighbor_fraction
            )));
        }
        if self.num_local < 1 {
            return Err(Error::InvalidConfig("num_local must be >= 1".into()));
        }
        Ok(())
    }
}

/// CLARA: repeatedly run BUILD + the inner optimizer on a subsample, judge
/// every result by total deviation on the full matrix, return the best.
pub fn clara<M: Dissimilarity>(matrix: &M, k: usize, config: &ClaraConfig) -> Result<ClusteringResult> {
    let n = matrix.len();
    if k < 2 || k >= n {
        return Err(Error::InvalidMedoids(format!(
            "clara needs 2 <= k < n, got k={k}, n={n}"
        )));
    }
    let started = Instant::now();
    let s = config.sample_size_rule.resolve(n, k);
    let mut best: Option<ClusteringResult> = None;
    let mut total_iterations = 0;
    let mut total_swaps = 0;
    for draw in 0..config.n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(draw as u64 + 1);
        let mut indices = sample_sorted(&mut rng, n, s);
        indices.sort_unstable();
        let view = SubsetView::new(matrix, indices);
        let meds = init_build(&view, k)?;
        let inner = optimize(&view, meds, &config.inner)?;
        total_iterations += inner.n_iterations;
        total_swaps += inner.n_swaps;
        let global: Vec<usize> = inner
            .medoids
            .indices()
            .iter()
            .map(|&i| view.to_base(i))
            .collect();
        let medoids = MedoidSet::new(global, n)?;
        let loss = total_deviation(matrix, &medoids);
        if best.as_ref().is_none_or(|b| loss < b.loss) {
            let cache = assign_nearest(matrix, &medoids)?;
            best = Some(ClusteringResult {
                assignment: cache.nearest,
                loss,
                medoids,
                n_iterations: 0,
                n_swaps: 0,
                swap_trace: Vec::new(),
                converged: inner.converged,
                wall_time: 0.0,
            });
        }
    }
    let mut best = best.expect("n_samples >= 1");
    best.n_iterations = total_iterations;
    best.n_swaps = total_swaps;
    best.wall_time = started.elapsed().as_secs_f64();
    Ok(best)
}

/// CLARA with the improved defaults (FasterPAM inside, doubled samples).
pub fn fastclara<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    config: &ClaraConfig,
) -> Result<ClusteringResult> {
    clara(matrix, k, config)
}

/// CLARANS: randomized greedy exploration of the swap graph. Each restart
/// draws uniform (medoid slot, non-medoid) pairs, swaps eagerly on negative
/// ΔTD, and gives up after `ceil(fraction·k·(n−k))` consecutive failures.
pub fn clarans<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    config: &ClaransConfig,
) -> Result<ClusteringResult> {
    config.validate()?;
    let n = matrix.len();
    if k < 2 || k >= n {
        return Err(Error::InvalidMedoids(format!(
            "clarans needs 2 <= k < n, got k={k}, n={n}"
        )));
    }
    let max_attempts =
        ((config.max_neighbor_fraction * (k * (n - k)) as f64).ceil() as usize).max(1);
    run_restarts(matrix, k, config, |matrix, medoids, rng, state| {
        let mut cache = assign_nearest(matrix, medoids)?;
        let mut attempts = 0;
        while attempts < max_attempts {
            let slot = rng.random_range(0..k);
            let candidate = random_non_medoid(rng, n, medoids);
            let delta = swap_delta_oracle(matrix, medoids, &cache, slot, candidate)?;
            if delta < 0.0 {
                apply_swap(matrix, medoids, &mut cache, slot, candidate)?;
                state.n_swaps += 1;
                state.td += delta;
                attempts = 0;
            } else {
                attempts += 1;
            }
        }
        Ok(())
    })
}

/// FastCLARANS: draws only the candidate and evaluates all k medoid slots at
/// once via the accumulator pass; budget `ceil(fraction·(n−k))` attempts.
pub fn fastclarans<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    config: &ClaransConfig,
) -> Result<ClusteringResult> {
    config.validate()?;
    let n = matrix.len();
    if k < 2 || k >= n {
        return Err(Error::InvalidMedoids(format!(
            "fastclarans needs 2 <= k < n, got k={k}, n={n}"
        )));
    }
    let max_attempts = ((config.max_neighbor_fraction * (n - k) as f64).ceil() as usize).max(1);
    run_restarts(matrix, k, config, |matrix, medoids, rng, state| {
        let mut cache = assign_nearest(matrix, medoids)?;
        let mut removal = removal_loss(&cache, k);
        let mut deltas = vec![0.0; k];
        let mut attempts = 0;
        while attempts < max_attempts {
            let candidate = random_non_medoid(rng, n, medoids);
            let (slot, delta) =
                crate::optimize::best_slot_for(matrix, &cache, &removal, candidate, &mut deltas);
            if delta < 0.0 {
                apply_swap(matrix, medoids, &mut cache, slot, candidate)?;
                removal = removal_loss(&cache, k);
                state.n_swaps += 1;
                state.td += delta;
                attempts = 0;
            } else {
                attempts += 1;
            }
        }
        Ok(())
    })
}

struct RestartState {
    td: f64,
    n_swaps: usize,
}

fn run_restarts<M, F>(
    matrix: &M,
    k: usize,
    config: &ClaransConfig,
    mut explore: F,
) -> Result<ClusteringResult>
where
    M: Dissimilarity,
    F: FnMut(&M, &mut MedoidSet, &mut ChaCha8Rng, &mut RestartState) -> Result<()>,
{
    let n = matrix.len();
    let started = Instant::now();
    let mut best: Option<(MedoidSet, f64)> = None;
    let mut total_swaps = 0;
    for restart in 0..config.num_local {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64 + 1);
        let mut medoids = {
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                pool.swap(i, j);
            }
            pool.truncate(k);
            MedoidSet::new(pool, n)?
        };
        let mut state = RestartState {
            td: total_deviation(matrix, &medoids),
            n_swaps: 0,
        };
        explore(matrix, &mut medoids, &mut rng, &mut state)?;
        debug_assert!(
            (state.td - total_deviation(matrix, &medoids)).abs()
                <= 1e-9 * state.td.abs().max(1.0)
        );
        total_swaps += state.n_swaps;
        let loss = total_deviation(matrix, &medoids);
        if best.as_ref().is_none_or(|(_, b)| loss < *b) {
            best = Some((medoids, loss));
        }
    }
    let (medoids, loss) = best.expect("num_local >= 1");
    let cache = assign_nearest(matrix, &medoids)?;
    Ok(ClusteringResult {
        assignment: cache.nearest,
        loss,
        medoids,
        n_iterations: config.num_local,
        n_swaps: total_swaps,
        swap_trace: Vec::new(),
        converged: true,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn random_non_medoid<R: Rng>(rng: &mut R, n: usize, medoids: &MedoidSet) -> usize {
    loop {
        let c = rng.random_range(0..n);
        if !medoids.contains(c) {
            return c;
        }
    }
}

/// Draw `s` distinct indices from `0..n`.
fn sample_sorted<R: Rng>(rng: &mut R, n: usize, s: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..s {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(s);
    pool
}
