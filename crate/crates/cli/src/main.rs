//! `medoids`: cluster a dataset, run benchmark grids, or convert p-median
//! graph files into dense matrix containers.
//!
//! Every subcommand prints its fully resolved configuration (RNG and seed
//! included) before doing any work, so a run can be reproduced from its
//! output alone. Exit codes: 0 success, 2 usage/input error, 3
//! non-convergence.

use clap::{Parser, Subcommand, ValueEnum};
use medoids_core::eval::{aggregate, bench_run, BenchReport, BenchRow, Method};
use medoids_core::ingest::{graph_to_matrix, load_optima, load_vectors, parse_orlib};
use medoids_core::init::{initialize, InitMethod};
use medoids_core::matrix::{Dissimilarity, DissimilarityMatrix, Metric};
use medoids_core::model::total_deviation;
use medoids_core::optimize::{optimize, OptimizerConfig};
use medoids_core::sampling::{clara, clarans, ClaraConfig, ClaransConfig};
use medoids_core::ProblemInstance;
use rand::Rng;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Default seed when neither `--seed` nor `MEDOIDS_SEED` is given.
const DEFAULT_SEED: u64 = 42;
const SEED_ENV: &str = "MEDOIDS_SEED";
const RNG_NAME: &str = "ChaCha8";

/// Magic bytes of the binary matrix container written by `convert`:
/// 8-byte magic, u64 LE point count n, u64 LE instance p, then n·n
/// little-endian f64 values in row-major order.
const MATRIX_MAGIC: &[u8; 8] = b"MEDMATRX";

const EXIT_INPUT: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "medoids", about = "k-medoids clustering tool", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster one dataset and write the result as JSON.
    Cluster(ClusterArgs),
    /// Run an algorithm×initializer grid over a manifest of instances.
    Bench(BenchArgs),
    /// Convert a p-median graph file to a dense matrix container.
    Convert(ConvertArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Orlib,
    Matrix,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Manhattan,
    Sqeuclidean,
}

impl MetricArg {
    fn to_metric(self) -> Metric {
        match self {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::Manhattan => Metric::Manhattan,
            MetricArg::Sqeuclidean => Metric::SquaredEuclidean,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MetricArg::Euclidean => "euclidean",
            MetricArg::Manhattan => "manhattan",
            MetricArg::Sqeuclidean => "sqeuclidean",
        }
    }
}

#[derive(Parser)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_enum, default_value = "euclidean")]
    metric: MetricArg,
    /// Cluster count; defaults to the instance's p for graph inputs.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "fasterpam")]
    algo: String,
    #[arg(long, default_value = "random")]
    init: String,
    /// Integer seed, or "random" for entropy.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Result file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Parser)]
struct BenchArgs {
    /// Text file listing one instance path per line, relative to the
    /// manifest's directory; `#` comments allowed.
    #[arg(long)]
    manifest: PathBuf,
    /// Sidecar of known optima ("name value" lines).
    #[arg(long)]
    optima: Option<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, default_value = "pam,fasterpam")]
    algo: String,
    /// Comma-separated initializers.
    #[arg(long, default_value = "random")]
    init: String,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Concurrent workers over instances; timing-sensitive runs should use 1.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report path prefix; writes PREFIX.csv and PREFIX.json.
    #[arg(long, default_value = "bench")]
    output: PathBuf,
}

#[derive(Parser)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Cluster(args) => cmd_cluster(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Convert(args) => cmd_convert(&args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn resolve_seed(flag: &Option<String>) -> Result<u64, String> {
    let text = match flag {
        Some(s) => s.clone(),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => v,
            Err(_) => return Ok(DEFAULT_SEED),
        },
    };
    if text == "random" {
        return Ok(rand::rng().random());
    }
    text.parse()
        .map_err(|_| format!("--seed expects an integer or \"random\", got {text:?}"))
}

/// Load a matrix (and the requested k for graph inputs) in any of the three
/// input formats.
fn load_matrix(
    path: &Path,
    format: Format,
    metric: Metric,
) -> Result<(DissimilarityMatrix, Option<usize>), String> {
    match format {
        Format::Csv => {
            let m = load_vectors(path, metric).map_err(|e| e.to_string())?;
            Ok((m, None))
        }
        Format::Orlib => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            let graph = parse_orlib(&text).map_err(|e| e.to_string())?;
            let m = graph_to_matrix(&graph).map_err(|e| e.to_string())?;
            Ok((m, Some(graph.p)))
        }
        Format::Matrix => {
            let (m, p) = read_matrix_container(path)?;
            Ok((m, (p > 0).then_some(p)))
        }
    }
}

fn cmd_cluster(args: &ClusterArgs) -> Result<u8, String> {
    let method: Method = args.algo.parse().map_err(|e: medoids_core::Error| e.to_string())?;
    let init: InitMethod = args.init.parse().map_err(|e: medoids_core::Error| e.to_string())?;
    let seed = resolve_seed(&args.seed)?;
    let (matrix, file_k) = load_matrix(&args.input, args.format, args.metric.to_metric())?;
    let n = matrix.len();
    let k = args
        .k
        .or(file_k)
        .ok_or("--k is required for this input format")?;
    if k < 2 {
        return Err(format!("--k must be at least 2 (got {k})"));
    }
    if k >= n {
        return Err(format!("--k must be smaller than the point count {n} (got {k})"));
    }
    if args.restarts == 0 {
        return Err("--restarts must be at least 1".into());
    }

    let init_label = if method.uses_initializer() {
        init.name()
    } else {
        "-"
    };
    println!("# medoids cluster");
    println!(
        "# input={} format={} metric={} n={} k={}",
        args.input.display(),
        format_name(args.format),
        args.metric.name(),
        n,
        k
    );
    println!(
        "# algo={} init={} rng={} seed={} restarts={} max-iter={}",
        method.name(),
        init_label,
        RNG_NAME,
        seed,
        args.restarts,
        args.max_iter
    );

    let name = args
        .input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut best: Option<RunOutcome> = None;
    for restart in 0..args.restarts {
        // algorithm-independent: result-identical methods (pam/fastpam1)
        // must see identical starting medoids for the same seed
        let run_seed = cluster_seed(seed, &name, init_label, restart);
        let outcome = run_method(&matrix, k, method, init, run_seed, args.max_iter)
            .map_err(|e| e.to_string())?;
        if best.as_ref().is_none_or(|b| outcome.loss < b.loss) {
            best = Some(outcome);
        }
    }
    let best = best.expect("restarts >= 1");

    let output = serde_json::json!({
        "algorithm": method.name(),
        "initializer": init_label,
        "rng": RNG_NAME,
        "seed": seed,
        "restarts": args.restarts,
        "n": n,
        "k": k,
        "loss": best.loss,
        "medoids": best.medoids,
        "assignment": best.assignment,
        "n_iterations": best.n_iterations,
        "n_swaps": best.n_swaps,
        "converged": best.converged,
    });
    let text = serde_json::to_string_pretty(&output).expect("serializable") + "\n";
    match &args.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => print!("{text}"),
    }
    println!("loss={} medoids={:?}", best.loss, best.medoids);
    if !best.converged {
        eprintln!("error: did not converge within {} iterations", args.max_iter);
        return Ok(EXIT_NO_CONVERGENCE);
    }
    Ok(0)
}

fn cluster_seed(base: u64, name: &str, init_label: &str, restart: usize) -> u64 {
    let mut h = 0xcbf29ce484222325_u64;
    for b in name.bytes().chain(init_label.bytes()) {
        h = (h ^ b as u64).wrapping_mul(0x100000001b3);
    }
    let mut z = base ^ h ^ 0x9e3779b97f4a7c15_u64.wrapping_mul(restart as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct RunOutcome {
    loss: f64,
    medoids: Vec<usize>,
    assignment: Vec<usize>,
    n_iterations: usize,
    n_swaps: usize,
    converged: bool,
}

fn run_method(
    matrix: &DissimilarityMatrix,
    k: usize,
    method: Method,
    init: InitMethod,
    run_seed: u64,
    max_iter: usize,
) -> medoids_core::Result<RunOutcome> {
    let result = match method {
        Method::Clara => clara(matrix, k, &ClaraConfig::classic(run_seed))?,
        Method::FastClara => clara(matrix, k, &ClaraConfig::fast(run_seed))?,
        Method::Clarans => clarans(matrix, k, &ClaransConfig::classic(run_seed))?,
        Method::FastClarans => {
            medoids_core::sampling::fastclarans(matrix, k, &ClaransConfig::fast(run_seed))?
        }
        _ => {
            let algorithm = match method {
                Method::Pam => medoids_core::OptAlgorithm::Pam,
                Method::FastPam1 => medoids_core::OptAlgorithm::FastPam1,
                Method::EagerPam => medoids_core::OptAlgorithm::EagerPam,
                Method::FasterPam => medoids_core::OptAlgorithm::FasterPam,
                Method::Alternating => medoids_core::OptAlgorithm::Alternating,
                _ => unreachable!(),
            };
            let medoids = initialize(matrix, k, init, run_seed)?;
            let config = OptimizerConfig {
                algorithm,
                max_iterations: max_iter,
            };
            optimize(matrix, medoids, &config)?
        }
    };
    // report the independently recomputed loss, not the running counter
    let loss = total_deviation(matrix, &result.medoids);
    Ok(RunOutcome {
        loss,
        medoids: result.medoids.indices().to_vec(),
        assignment: result.assignment,
        n_iterations: result.n_iterations,
        n_swaps: result.n_swaps,
        converged: result.converged,
    })
}

fn format_name(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Orlib => "orlib",
        Format::Matrix => "matrix",
    }
}

fn cmd_convert(args: &ConvertArgs) -> Result<u8, String> {
    println!("# medoids convert");
    println!(
        "# input={} output={}",
        args.input.display(),
        args.output.display()
    );
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| format!("{}: {e}", args.input.display()))?;
    let graph = parse_orlib(&text).map_err(|e| e.to_string())?;
    let matrix = graph_to_matrix(&graph).map_err(|e| e.to_string())?;
    write_matrix_container(&args.output, &matrix, graph.p)?;
    println!("wrote {}x{} matrix (p={})", matrix.len(), matrix.len(), graph.p);
    Ok(0)
}

fn write_matrix_container(path: &Path, matrix: &DissimilarityMatrix, p: usize) -> Result<(), String> {
    let n = matrix.len();
    let mut bytes = Vec::with_capacity(8 + 16 + n * n * 8);
    bytes.extend_from_slice(MATRIX_MAGIC);
    bytes.extend_from_slice(&(n as u64).to_le_bytes());
    bytes.extend_from_slice(&(p as u64).to_le_bytes());
    for i in 0..n {
        for j in 0..n {
            bytes.extend_from_slice(&matrix.get(i, j).to_le_bytes());
        }
    }
    std::fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_matrix_container(path: &Path) -> Result<(DissimilarityMatrix, usize), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if bytes.len() < 24 || &bytes[..8] != MATRIX_MAGIC {
        return Err(format!("{}: not a matrix container", path.display()));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let p = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let expected = 24 + n * n * 8;
    if bytes.len() != expected {
        return Err(format!(
            "{}: expected {expected} bytes for n={n}, found {}",
            path.display(),
            bytes.len()
        ));
    }
    let values: Vec<f64> = bytes[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let matrix = DissimilarityMatrix::from_values(n, values).map_err(|e| e.to_string())?;
    Ok((matrix, p))
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, String> {
    let seed = resolve_seed(&args.seed)?;
    let methods: Vec<Method> = args
        .algo
        .split(',')
        .map(|s| s.trim().parse().map_err(|e: medoids_core::Error| e.to_string()))
        .collect::<Result<_, _>>()?;
    let inits: Vec<InitMethod> = args
        .init
        .split(',')
        .map(|s| s.trim().parse().map_err(|e: medoids_core::Error| e.to_string()))
        .collect::<Result<_, _>>()?;
    if args.restarts == 0 {
        return Err("--restarts must be at least 1".into());
    }
    if args.jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    // self-initializing methods appear once, not once per initializer
    let mut grid: Vec<(Method, InitMethod)> = Vec::new();
    for &m in &methods {
        if m.uses_initializer() {
            grid.extend(inits.iter().map(|&i| (m, i)));
        } else {
            grid.push((m, inits[0]));
        }
    }

    println!("# medoids bench");
    println!(
        "# manifest={} optima={} rng={} seed={} restarts={} jobs={}",
        args.manifest.display(),
        args.optima
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "none".into()),
        RNG_NAME,
        seed,
        args.restarts,
        args.jobs
    );
    println!(
        "# grid: algos=[{}] inits=[{}]",
        methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
        inits.iter().map(|i| i.name()).collect::<Vec<_>>().join(",")
    );

    let optima: HashMap<String, f64> = match &args.optima {
        Some(path) => load_optima(path).map_err(|e| e.to_string())?,
        None => HashMap::new(),
    };
    let manifest_text = std::fs::read_to_string(&args.manifest)
        .map_err(|e| format!("{}: {e}", args.manifest.display()))?;
    let base_dir = args.manifest.parent().unwrap_or(Path::new("."));

    let mut instances: Vec<ProblemInstance> = Vec::new();
    let mut error_rows: Vec<BenchRow> = Vec::new();
    for line in manifest_text.lines() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let path = base_dir.join(entry);
        match medoids_core::load_orlib_instance(&path, &optima) {
            Ok(instance) => instances.push(instance),
            Err(e) => {
                // a bad instance fails its own rows, not the whole report
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| entry.to_string());
                for &(method, init) in &grid {
                    let init_label = if method.uses_initializer() {
                        init.name().to_string()
                    } else {
                        "-".to_string()
                    };
                    for restart in 0..args.restarts {
                        error_rows.push(BenchRow {
                            instance: name.clone(),
                            method,
                            initializer: init_label.clone(),
                            restart,
                            seed,
                            loss: f64::NAN,
                            normalized_loss: None,
                            optimal: false,
                            n_iterations: 0,
                            n_swaps: 0,
                            init_time: 0.0,
                            optimize_time: 0.0,
                            error: Some(e.to_string()),
                        });
                    }
                }
            }
        }
    }

    let mut rows: Vec<BenchRow> = Vec::new();
    if args.jobs <= 1 || instances.len() <= 1 {
        let report =
            bench_run(&instances, &grid, args.restarts, seed).map_err(|e| e.to_string())?;
        rows.extend(report.rows);
    } else {
        // per-run seeds are position-independent, so splitting instances
        // across workers reproduces the serial report
        let results: Vec<Result<Vec<BenchRow>, String>> = std::thread::scope(|scope| {
            let chunk = instances.len().div_ceil(args.jobs);
            instances
                .chunks(chunk)
                .map(|part| {
                    let grid = &grid;
                    scope.spawn(move || {
                        bench_run(part, grid, args.restarts, seed)
                            .map(|r| r.rows)
                            .map_err(|e| e.to_string())
                    })
                })
                .collect::<Vec<_>>()
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for part in results {
            rows.extend(part?);
        }
    }
    rows.extend(error_rows);
    let aggregates = aggregate(&rows);
    let report = BenchReport { rows, aggregates };

    let csv_path = args.output.with_extension("csv");
    let json_path = args.output.with_extension("json");
    std::fs::write(&csv_path, report.to_csv().map_err(|e| e.to_string())?)
        .map_err(|e| format!("{}: {e}", csv_path.display()))?;
    std::fs::write(&json_path, report.to_json().map_err(|e| e.to_string())?)
        .map_err(|e| format!("{}: {e}", json_path.display()))?;

    print_summary(&report);
    println!(
        "# wrote {} rows to {} and {}",
        report.rows.len(),
        csv_path.display(),
        json_path.display()
    );
    let all_failed = !report.rows.is_empty() && report.rows.iter().all(|r| r.error.is_some());
    if all_failed {
        eprintln!("error: every benchmark run failed");
        return Ok(EXIT_INPUT);
    }
    Ok(0)
}

fn print_summary(report: &BenchReport) {
    println!(
        "{:<12} {:<12} {:<12} {:>10} {:>10} {:>8} {:>7} {:>5} {:>6} {:>6} {:>9}",
        "instance", "algorithm", "init", "mean", "min", "sigma", "norm%", "opt", "iter", "swaps", "time"
    );
    for a in &report.aggregates {
        println!(
            "{:<12} {:<12} {:<12} {:>10.1} {:>10.1} {:>8.2} {:>7} {:>5} {:>6.1} {:>6.1} {:>9.4}",
            a.instance,
            a.method.name(),
            a.initializer,
            a.mean_loss,
            a.min_loss,
            a.std_loss,
            a.mean_normalized_loss
                .map(|v| format!("{v:.1}"))
                .unwrap_or_else(|| "-".into()),
            a.optimal_count,
            a.mean_iterations,
            a.mean_swaps,
            a.mean_init_time + a.mean_optimize_time
        );
    }
}
