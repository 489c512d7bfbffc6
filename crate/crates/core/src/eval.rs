//! Quality metrics and the benchmark harness: normalized loss against a
//! random-medoid baseline, and a grid runner producing per-run rows plus
//! aggregates.

use crate::error::{Error, Result};
use crate::ingest::ProblemInstance;
use crate::init::{initialize, InitMethod};
use crate::matrix::{Dissimilarity, SubsetView};
use crate::model::{total_deviation, MedoidSet};
use crate::optimize::{optimize, OptAlgorithm, OptimizerConfig};
use crate::sampling::{clara, clarans, fastclara, fastclarans, ClaraConfig, ClaransConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;
use std::time::Instant;

/// Everything the harness (and the CLI) can run: the swap optimizers plus
/// the subsampling meta-algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pam,
    FastPam1,
    EagerPam,
    FasterPam,
    Alternating,
    Clara,
    FastClara,
    Clarans,
    FastClarans,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Pam,
        Method::FastPam1,
        Method::EagerPam,
        Method::FasterPam,
        Method::Alternating,
        Method::Clara,
        Method::FastClara,
        Method::Clarans,
        Method::FastClarans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Pam => "pam",
            Method::FastPam1 => "fastpam1",
            Method::EagerPam => "eagerpam",
            Method::FasterPam => "fasterpam",
            Method::Alternating => "alternating",
            Method::Clara => "clara",
            Method::FastClara => "fastclara",
            Method::Clarans => "clarans",
            Method::FastClarans => "fastclarans",
        }
    }

    /// Whether the method consumes an explicit initialization (the
    /// subsampling methods manage their own starting points).
    pub fn uses_initializer(self) -> bool {
        matches!(self.as_optimizer(), Some(_))
    }

    fn as_optimizer(self) -> Option<OptAlgorithm> {
        match self {
            Method::Pam => Some(OptAlgorithm::Pam),
            Method::FastPam1 => Some(OptAlgorithm::FastPam1),
            Method::EagerPam => Some(OptAlgorithm::EagerPam),
            Method::FasterPam => Some(OptAlgorithm::FasterPam),
            Method::Alternating => Some(OptAlgorithm::Alternating),
            _ => None,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

/// Mean total deviation of `n_draws` uniformly random medoid sets; the
/// denominator anchor for normalized loss.
pub fn random_baseline<M: Dissimilarity>(
    matrix: &M,
    k: usize,
    n_draws: usize,
    seed: u64,
) -> Result<f64> {
    let n = matrix.len();
    if k >= n {
        return Err(Error::InvalidMedoids(format!(
            "baseline needs k < n, got k={k}, n={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut sum = 0.0;
    for _ in 0..n_draws {
        for i in 0..k {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
        }
        let medoids = MedoidSet::new(pool[..k].to_vec(), n)?;
        sum += total_deviation(matrix, &medoids);
    }
    Ok(sum / n_draws as f64)
}

/// Normalized loss in percent: 0 at the proven optimum, 100 at the random
/// baseline.
pub fn normalized_loss(loss: f64, optimum: f64, random_mean: f64) -> Result<f64> {
    if random_mean <= optimum {
        return Err(Error::NonDiscriminativeBaseline {
            random_mean,
            optimum,
        });
    }
    Ok(100.0 * (loss - optimum) / (random_mean - optimum))
}

/// One benchmark run: a single (instance, method, initializer, restart)
/// execution.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: Method,
    /// Initializer name, or "-" for the self-initializing methods.
    pub initializer: String,
    pub restart: usize,
    pub seed: u64,
    pub loss: f64,
    pub normalized_loss: Option<f64>,
    /// True when the loss matched the known optimum within 1e-6.
    pub optimal: bool,
    pub n_iterations: usize,
    pub n_swaps: usize,
    pub init_time: f64,
    pub optimize_time: f64,
    pub error: Option<String>,
}

/// Aggregates over the restarts of one grid cell.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BenchAggregate {
    pub instance: String,
    pub method: Method,
    pub initializer: String,
    pub n_runs: usize,
    pub n_errors: usize,
    pub mean_loss: f64,
    pub min_loss: f64,
    pub std_loss: f64,
    pub mean_normalized_loss: Option<f64>,
    /// Runs whose loss matched the known optimum within 1e-6.
    pub optimal_count: usize,
    pub mean_iterations: f64,
    pub mean_swaps: f64,
    pub mean_init_time: f64,
    pub mean_optimize_time: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<BenchAggregate>,
}

/// Run every (method, initializer) cell of the grid on every instance,
/// `n_restarts` times each with derived seeds and a fresh input-order
/// permutation per restart. Failures become rows with an error message; the
/// harness keeps going.
pub fn bench_run(
    instances: &[ProblemInstance],
    grid: &[(Method, InitMethod)],
    n_restarts: usize,
    seed: u64,
) -> Result<BenchReport> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty method grid".into()));
    }
    if n_restarts == 0 {
        return Err(Error::InvalidConfig("n_restarts must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for instance in instances {
        let baseline = random_baseline(&instance.matrix, instance.k, 100, seed ^ 0x9e37)?;
        for &(method, init) in grid {
            let init_label = if method.uses_initializer() {
                init.name()
            } else {
                "-"
            };
            for restart in 0..n_restarts {
                let run_seed = derive_seed(seed, &instance.name, method, init_label, restart);
                let mut row = run_one(instance, method, init, restart, run_seed);
                if row.error.is_none() {
                    if let Some(opt) = instance.known_optimum {
                        if row.loss < opt - 1e-6 {
                            row.error = Some(format!(
                                "loss {} below recorded optimum {opt}",
                                row.loss
                            ));
                        } else {
                            row.normalized_loss =
                                Some(normalized_loss(row.loss, opt, baseline)?);
                            row.optimal = (row.loss - opt).abs() <= 1e-6;
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    let aggregates = aggregate(&rows);
    Ok(BenchReport { rows, aggregates })
}

/// Per-run seed derived from the run's coordinates, not its position in the
/// report, so partitioning the grid across workers cannot change results.
pub fn derive_seed(
    base: u64,
    instance: &str,
    method: Method,
    init_label: &str,
    restart: usize,
) -> u64 {
    // FNV-1a over the coordinates, then a splitmix64 finalizer
    let mut h = 0xcbf29ce484222325_u64;
    for b in instance
        .bytes()
        .chain(method.name().bytes())
        .chain(init_label.bytes())
    {
        h = (h ^ b as u64).wrapping_mul(0x100000001b3);
    }
    let mut z = base ^ h ^ 0x9e3779b97f4a7c15_u64.wrapping_mul(restart as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn run_one(
    instance: &ProblemInstance,
    method: Method,
    init: InitMethod,
    restart: usize,
    run_seed: u64,
) -> BenchRow {
    let n = instance.matrix.len();
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let view = SubsetView::new(&instance.matrix, perm);
    let initializer = if method.uses_initializer() {
        init.name().to_string()
    } else {
        "-".to_string()
    };
    let mut row = BenchRow {
        instance: instance.name.clone(),
        method,
        initializer,
        restart,
        seed: run_seed,
        loss: f64::NAN,
        normalized_loss: None,
        optimal: false,
        n_iterations: 0,
        n_swaps: 0,
        init_time: 0.0,
        optimize_time: 0.0,
        error: None,
    };
    let outcome: crate::error::Result<(Vec<usize>, usize, usize)> = (|| {
        let k = instance.k;
        match method.as_optimizer() {
            Some(algorithm) => {
                let t0 = Instant::now();
                let medoids = initialize(&view, k, init, run_seed)?;
                row.init_time = t0.elapsed().as_secs_f64();
                let t1 = Instant::now();
                let result =
                    optimize(&view, medoids, &OptimizerConfig::new(algorithm))?;
                row.optimize_time = t1.elapsed().as_secs_f64();
                Ok((
                    result.medoids.indices().to_vec(),
                    result.n_iterations,
                    result.n_swaps,
                ))
            }
            None => {
                let t1 = Instant::now();
                let result = match method {
                    Method::Clara => clara(&view, k, &ClaraConfig::classic(run_seed))?,
                    Method::FastClara => fastclara(&view, k, &ClaraConfig::fast(run_seed))?,
                    Method::Clarans => clarans(&view, k, &ClaransConfig::classic(run_seed))?,
                    Method::FastClarans => {
                        fastclarans(&view, k, &ClaransConfig::fast(run_seed))?
                    }
                    _ => unreachable!(),
                };
                row.optimize_time = t1.elapsed().as_secs_f64();
                Ok((
                    result.medoids.indices().to_vec(),
                    result.n_iterations,
                    result.n_swaps,
                ))
            }
        }
    })();
    match outcome {
        Ok((view_medoids, n_iterations, n_swaps)) => {
            // recompute the loss on the unpermuted matrix; never trust the
            // optimizer's running counter
            let base: Vec<usize> = view_medoids.iter().map(|&i| view.to_base(i)).collect();
            match MedoidSet::new(base, n) {
                Ok(medoids) => row.loss = total_deviation(&instance.matrix, &medoids),
                Err(e) => row.error = Some(e.to_string()),
            }
            row.n_iterations = n_iterations;
            row.n_swaps = n_swaps;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Pure fold from rows to per-cell aggregates; re-running it on serialized
/// rows reproduces the aggregates exactly.
pub fn aggregate(rows: &[BenchRow]) -> Vec<BenchAggregate> {
    let mut out: Vec<BenchAggregate> = Vec::new();
    for row in rows {
        let cell = out.iter_mut().find(|a| {
            a.instance == row.instance
                && a.method == row.method
                && a.initializer == row.initializer
        });
        let cell = match cell {
            Some(c) => c,
            None => {
                out.push(BenchAggregate {
                    instance: row.instance.clone(),
                    method: row.method,
                    initializer: row.initializer.clone(),
                    n_runs: 0,
                    n_errors: 0,
                    mean_loss: 0.0,
                    min_loss: f64::INFINITY,
                    std_loss: 0.0,
                    mean_normalized_loss: None,
                    optimal_count: 0,
                    mean_iterations: 0.0,
                    mean_swaps: 0.0,
                    mean_init_time: 0.0,
                    mean_optimize_time: 0.0,
                });
                out.last_mut().unwrap()
            }
        };
        cell.n_runs += 1;
        if row.error.is_some() {
            cell.n_errors += 1;
        }
    }
    for cell in &mut out {
        let ok: Vec<&BenchRow> = rows
            .iter()
            .filter(|r| {
                r.instance == cell.instance
                    && r.method == cell.method
                    && r.initializer == cell.initializer
                    && r.error.is_none()
            })
            .collect();
        if ok.is_empty() {
            cell.mean_loss = f64::NAN;
            cell.min_loss = f64::NAN;
            cell.std_loss = f64::NAN;
            continue;
        }
        let m = ok.len() as f64;
        cell.mean_loss = ok.iter().map(|r| r.loss).sum::<f64>() / m;
        cell.min_loss = ok.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min);
        let var = ok
            .iter()
            .map(|r| (r.loss - cell.mean_loss).powi(2))
            .sum::<f64>()
            / m;
        cell.std_loss = var.sqrt();
        let norms: Vec<f64> = ok.iter().filter_map(|r| r.normalized_loss).collect();
        cell.mean_normalized_loss = if norms.len() == ok.len() {
            Some(norms.iter().sum::<f64>() / m)
        } else {
            None
        };
        cell.optimal_count = ok.iter().filter(|r| r.optimal).count();
        cell.mean_iterations = ok.iter().map(|r| r.n_iterations as f64).sum::<f64>() / m;
        cell.mean_swaps = ok.iter().map(|r| r.n_swaps as f64).sum::<f64>() / m;
        cell.mean_init_time = ok.iter().map(|r| r.init_time).sum::<f64>() / m;
        cell.mean_optimize_time = ok.iter().map(|r| r.optimize_time).sum::<f64>() / m;
    }
    out
}

impl BenchReport {
    /// One CSV row per run.
    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer.serialize(row).map_err(csv_err)?;
        }
        let bytes = writer.into_inner().map_err(|e| csv_err(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Rows plus aggregates.
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidConfig(format!("csv serialization failed: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DissimilarityMatrix;
    use crate::synthetic::{blob_matrix, manhattan_1d};

    fn instance(matrix: DissimilarityMatrix, k: usize, optimum: Option<f64>) -> ProblemInstance {
        ProblemInstance {
            matrix,
            k,
            name: "test".into(),
            known_optimum: optimum,
        }
    }

    #[test]
    fn baseline_on_zero_matrix_is_zero() {
        let m = DissimilarityMatrix::from_values(4, vec![0.0; 16]).unwrap();
        assert_eq!(random_baseline(&m, 2, 100, 1).unwrap(), 0.0);
    }

    #[test]
    fn baseline_single_draw_equals_that_td() {
        let m = manhattan_1d(&[0.0, 1.0, 5.0, 6.0]);
        let b = random_baseline(&m, 2, 1, 7).unwrap();
        // replicate the single draw
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut pool: Vec<usize> = (0..4).collect();
        for i in 0..2 {
            let j = rng.random_range(i..4);
            pool.swap(i, j);
        }
        let medoids = MedoidSet::new(pool[..2].to_vec(), 4).unwrap();
        assert_eq!(b, total_deviation(&m, &medoids));
    }

    #[test]
    fn normalized_loss_endpoints_and_linearity() {
        assert_eq!(normalized_loss(10.0, 10.0, 30.0).unwrap(), 0.0);
        assert_eq!(normalized_loss(30.0, 10.0, 30.0).unwrap(), 100.0);
        assert_eq!(normalized_loss(20.0, 10.0, 30.0).unwrap(), 50.0);
        assert!(matches!(
            normalized_loss(5.0, 10.0, 10.0),
            Err(Error::NonDiscriminativeBaseline { .. })
        ));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("kmeans".parse::<Method>().is_err());
    }

    #[test]
    fn bench_run_deterministic() {
        let inst = vec![instance(blob_matrix(60, 2, 3, 5), 3, None)];
        let grid = vec![(Method::FasterPam, InitMethod::Random)];
        let mut a = bench_run(&inst, &grid, 3, 42).unwrap();
        let mut b = bench_run(&inst, &grid, 3, 42).unwrap();
        // measured wall times are the only nondeterministic fields
        for report in [&mut a, &mut b] {
            for row in &mut report.rows {
                row.init_time = 0.0;
                row.optimize_time = 0.0;
            }
            report.aggregates = aggregate(&report.rows);
        }
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
    }

    #[test]
    fn min_loss_le_mean_loss() {
        let inst = vec![instance(blob_matrix(80, 2, 4, 6), 4, None)];
        let grid = vec![
            (Method::Pam, InitMethod::Random),
            (Method::FasterPam, InitMethod::Random),
            (Method::Clara, InitMethod::Random),
        ];
        let report = bench_run(&inst, &grid, 5, 9).unwrap();
        for agg in &report.aggregates {
            assert!(agg.min_loss <= agg.mean_loss + 1e-12, "{agg:?}");
            assert_eq!(agg.n_errors, 0);
            assert_eq!(agg.n_runs, 5);
        }
    }

    #[test]
    fn known_optimum_enables_normalization_and_optimal_count() {
        // optimum for this instance is medoids {1, 2} or similar; compute by
        // brute force to keep the fixture honest
        let m = manhattan_1d(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        let (_, opt) = crate::exhaustive::brute_force_optimum(&m, 2);
        let inst = vec![instance(m, 2, Some(opt))];
        let grid = vec![(Method::Pam, InitMethod::Build)];
        let report = bench_run(&inst, &grid, 4, 3).unwrap();
        let agg = &report.aggregates[0];
        assert_eq!(agg.optimal_count, 4);
        assert_eq!(agg.mean_normalized_loss, Some(0.0));
    }

    #[test]
    fn reaggregating_serialized_rows_is_pure() {
        let inst = vec![instance(blob_matrix(50, 2, 3, 8), 3, None)];
        let grid = vec![
            (Method::EagerPam, InitMethod::Lab),
            (Method::FastClarans, InitMethod::Random),
        ];
        let report = bench_run(&inst, &grid, 3, 17).unwrap();
        let json = serde_json::to_string(&report.rows).unwrap();
        let rows: Vec<BenchRow> = serde_json::from_str(&json).unwrap();
        assert_eq!(aggregate(&rows), report.aggregates);
    }

    #[test]
    fn phase_times_recorded_for_optimizer_methods() {
        let inst = vec![instance(blob_matrix(100, 2, 4, 2), 4, None)];
        let grid = vec![(Method::Pam, InitMethod::Build)];
        let report = bench_run(&inst, &grid, 1, 1).unwrap();
        let row = &report.rows[0];
        assert!(row.init_time > 0.0);
        assert!(row.optimize_time > 0.0);
    }

    #[test]
    fn errors_are_row_level_and_harness_continues() {
        // k = n is invalid; every run errors but bench_run still returns
        let m = manhattan_1d(&[0.0, 1.0, 2.0]);
        let bad = ProblemInstance {
            matrix: m,
            k: 2,
            name: "bad-optimum".into(),
            known_optimum: Some(1e9), // impossible: all losses fall below it
        };
        let grid = vec![(Method::FasterPam, InitMethod::Random)];
        let report = bench_run(&[bad], &grid, 2, 5).unwrap();
        assert_eq!(report.aggregates[0].n_errors, 2);
        assert!(report.rows.iter().all(|r| r.error.is_some()));
    }
}
