//! Initialization strategies: uniform random, BUILD, GreedyG, LAB,
//! distance-weighted sampling, and the Park & Jun heuristic.
//!
//! Deterministic methods (BUILD, GreedyG, Park & Jun) are pure functions of
//! the matrix and k; the stochastic ones additionally of the seed (ChaCha8).

use crate::error::{Error, Result};
use crate::matrix::Dissimilarity;
use crate::model::{medoid_of_set, MedoidSet};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Selectable initialization method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMethod {
    Random,
    Build,
    #[serde(rename = "greedyg")]
    GreedyG,
    Lab,
    #[serde(rename = "distweighted")]
    DistanceWeighted,
    #[serde(rename = "parkjun")]
    ParkJun,
}

impl InitMethod {
    pub const ALL: [InitMethod; 6] = [
        InitMethod::Random,
        InitMethod::Build,
        InitMethod::GreedyG,
        InitMethod::Lab,
        InitMethod::DistanceWeighted,
        InitMethod::ParkJun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitMethod::Random => "random",
            InitMethod::Build => "build",
            InitMethod::GreedyG => "greedyg",
            InitMethod::Lab => "lab",
            InitMethod::DistanceWeighted => "distweighted",
            InitMethod::ParkJun => "parkjun",
        }
    }
}

impl std::str::FromStr for InitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InitMethod::Random),
            "build" => Ok(InitMethod::Build),
            "greedyg" => Ok(InitMethod::GreedyG),
            "lab" => Ok(InitMethod::Lab),
            "distweighted" => Ok(InitMethod::DistanceWeighted),
            "parkjun" => Ok(InitMethod::ParkJun),
            _ => Err(Error::InvalidConfig(format!("unknown init method: {s}"))),
        }
    }
}

/// Run the chosen initializer.
pub fn initialize<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    method: InitMethod,
    seed: u64,
) -> Result<MedoidSet> {
    match method {
        InitMethod::Random => init_random(matrix, k, seed),
        InitMethod::Build => init_build(matrix, k),
        InitMethod::GreedyG => init_greedy_g(matrix, k),
        InitMethod::Lab => init_lab(matrix, k, seed),
        InitMethod::DistanceWeighted => init_distance_weighted(matrix, k, seed),
        InitMethod::ParkJun => init_park_jun(matrix, k),
    }
}

fn check_k<M: Dissimilarity>(matrix: &M, k: usize) -> Result<usize> {
    let n = matrix.len();
    if k < 1 || k >= n {
        return Err(Error::InvalidMedoids(format!(
            "k must satisfy 1 <= k < n, got k={k}, n={n}"
        )));
    }
    Ok(n)
}

/// k distinct indices drawn uniformly without replacement.
pub fn init_random<M: Dissimilarity>(matrix: &M, k: usize, seed: u64) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MedoidSet::new(sample_distinct(&mut rng, n, k), n)
}

/// Draw `k` distinct values from `0..n` (partial Fisher-Yates).
fn sample_distinct<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// PAM BUILD: first medoid is the global 1-medoid, then greedily add the
/// point that reduces total deviation most, reusing cached nearest distances.
pub fn init_build<M: Dissimilarity>(matrix: &M, k: usize) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let first = first_medoid(matrix);
    let mut meds = vec![first];
    let mut is_med = vec![false; n];
    is_med[first] = true;
    let mut dn: Vec<f64> = (0..n).map(|o| matrix.get(o, first)).collect();
    while meds.len() < k {
        let c = best_addition(matrix, &is_med, &dn, |_| true).expect("k < n");
        meds.push(c);
        is_med[c] = true;
        for o in 0..n {
            let d = matrix.get(o, c);
            if d < dn[o] {
                dn[o] = d;
            }
        }
    }
    MedoidSet::new(meds, n)
}

/// Point with the smallest distance sum to all others (ties: smaller index).
fn first_medoid<M: Dissimilarity>(matrix: &M) -> usize {
    let n = matrix.len();
    let mut best = (f64::INFINITY, usize::MAX);
    for c in 0..n {
        let s: f64 = (0..n).map(|o| matrix.get(o, c)).sum();
        if s < best.0 {
            best = (s, c);
        }
    }
    best.1
}

/// Greedy BUILD step: the non-medoid candidate with the most negative
/// `ΔTD = Σ_o min(0, d(o,c) - d_nearest(o))`, restricted by `admit`.
///
/// The candidate's own term contributes `-d_nearest(c)`, so the reduction is
/// the exact change in total deviation.
fn best_addition<M, F>(matrix: &M, is_med: &[bool], dn: &[f64], admit: F) -> Option<usize>
where
    M: Dissimilarity,
    F: Fn(usize) -> bool,
{
    let n = matrix.len();
    let mut best = (f64::INFINITY, usize::MAX);
    for c in 0..n {
        if is_med[c] || !admit(c) {
            continue;
        }
        let mut delta = 0.0;
        for o in 0..n {
            if !admit(o) {
                continue;
            }
            let dd = matrix.get(o, c) - dn[o];
            if dd < 0.0 {
                delta += dd;
            }
        }
        if delta < best.0 {
            best = (delta, c);
        }
    }
    (best.1 != usize::MAX).then_some(best.1)
}

/// GreedyG: BUILD interleaved with alternating medoid-update passes after
/// each addition (assign points, re-center every cluster, repeat until
/// stable, capped at 100 rounds).
pub fn init_greedy_g<M: Dissimilarity>(matrix: &M, k: usize) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let mut meds = vec![first_medoid(matrix)];
    for _ in 1..=k {
        if meds.len() == k {
            break;
        }
        let mut is_med = vec![false; n];
        let mut dn = vec![f64::INFINITY; n];
        for &m in &meds {
            is_med[m] = true;
        }
        for o in 0..n {
            for &m in &meds {
                dn[o] = dn[o].min(matrix.get(o, m));
            }
        }
        let c = best_addition(matrix, &is_med, &dn, |_| true).expect("k < n");
        meds.push(c);
        recentre(matrix, &mut meds)?;
    }
    MedoidSet::new(meds, n)
}

/// Alternate assignment and per-cluster medoid recomputation until no medoid
/// changes (at most 100 rounds). Empty clusters keep their medoid.
fn recentre<M: Dissimilarity>(matrix: &M, meds: &mut [usize]) -> Result<()> {
    let n = matrix.len();
    for _ in 0..100 {
        let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); meds.len()];
        for o in 0..n {
            let mut slot = 0;
            for (s, &m) in meds.iter().enumerate() {
                if matrix.get(o, m) < matrix.get(o, meds[slot]) {
                    slot = s;
                }
            }
            clusters[slot].push(o);
        }
        let mut changed = false;
        for (s, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            let m = medoid_of_set(matrix, members)?;
            if m != meds[s] {
                meds[s] = m;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(())
}

/// LAB (linear approximative BUILD): before each of the k selections a fresh
/// subsample of `min(10 + ceil(sqrt(n)), remaining)` non-medoid points is
/// drawn; the greedy criterion is evaluated with respect to that subsample
/// only.
pub fn init_lab<M: Dissimilarity>(matrix: &M, k: usize, seed: u64) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample_size = 10 + (n as f64).sqrt().ceil() as usize;
    let mut meds: Vec<usize> = Vec::with_capacity(k);
    let mut in_sample = vec![false; n];
    while meds.len() < k {
        let non_meds: Vec<usize> = (0..n).filter(|i| !meds.contains(i)).collect();
        let s = sample_size.min(non_meds.len());
        let picks = sample_distinct(&mut rng, non_meds.len(), s);
        in_sample.iter_mut().for_each(|b| *b = false);
        for &p in &picks {
            in_sample[non_meds[p]] = true;
        }
        let chosen = if meds.is_empty() {
            // 1-medoid of the subsample
            let mut best = (f64::INFINITY, usize::MAX);
            for c in 0..n {
                if !in_sample[c] {
                    continue;
                }
                let sum: f64 = (0..n)
                    .filter(|&o| in_sample[o])
                    .map(|o| matrix.get(o, c))
                    .sum();
                if sum < best.0 {
                    best = (sum, c);
                }
            }
            best.1
        } else {
            let mut dn = vec![f64::INFINITY; n];
            for o in 0..n {
                if in_sample[o] {
                    for &m in &meds {
                        dn[o] = dn[o].min(matrix.get(o, m));
                    }
                }
            }
            let is_med = vec![false; n]; // sample contains no medoids
            best_addition(matrix, &is_med, &dn, |i| in_sample[i]).expect("sample non-empty")
        };
        meds.push(chosen);
    }
    MedoidSet::new(meds, n)
}

/// Distance-weighted sampling: first medoid uniform, each next drawn with
/// probability proportional to its current nearest-medoid distance (linear
/// weights). All-duplicate remainders fall back to a uniform choice.
pub fn init_distance_weighted<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    seed: u64,
) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);
    let mut meds = vec![first];
    let mut dn: Vec<f64> = (0..n).map(|o| matrix.get(o, first)).collect();
    while meds.len() < k {
        let total: f64 = dn.iter().sum();
        let chosen = if total > 0.0 {
            let mut r = rng.random_range(0.0..1.0) * total;
            let mut pick = None;
            for (o, &w) in dn.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                r -= w;
                if r < 0.0 {
                    pick = Some(o);
                    break;
                }
            }
            // guard against accumulated rounding: last positive-weight point
            pick.unwrap_or_else(|| {
                dn.iter().rposition(|&w| w > 0.0).expect("total > 0")
            })
        } else {
            // all remaining points duplicate a chosen medoid
            let remaining: Vec<usize> = (0..n).filter(|i| !meds.contains(i)).collect();
            remaining[rng.random_range(0..remaining.len())]
        };
        meds.push(chosen);
        for o in 0..n {
            let d = matrix.get(o, chosen);
            if d < dn[o] {
                dn[o] = d;
            }
        }
    }
    MedoidSet::new(meds, n)
}

/// Park & Jun: the k points with the smallest normalized distance sums
/// `v_j = Σ_i d(i,j) / Σ_l d(i,l)` (ties: smaller index; 0/0 counts as 0).
pub fn init_park_jun<M: Dissimilarity>(matrix: &M, k: usize) -> Result<MedoidSet> {
    let n = check_k(matrix, k)?;
    let row_sums: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|l| matrix.get(i, l)).sum())
        .collect();
    let mut scored: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let v = (0..n)
                .map(|i| {
                    if row_sums[i] > 0.0 {
                        matrix.get(i, j) / row_sums[i]
                    } else {
                        0.0
                    }
                })
                .sum::<f64>();
            (v, j)
        })
        .collect();
    scored.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    MedoidSet::new(scored[..k].iter().map(|&(_, j)| j).collect(), n)
}
