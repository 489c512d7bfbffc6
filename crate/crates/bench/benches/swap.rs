//! Swap-phase benchmarks: the five optimizers from identical starts across
//! a range of k, on a fixed synthetic vector dataset.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use medoids_core::init::{init_build, init_random};
use medoids_core::optimize::{optimize, OptAlgorithm, OptimizerConfig};
use medoids_core::synthetic::blob_matrix;

fn swap_phase(c: &mut Criterion) {
    let matrix = blob_matrix(800, 5, 20, 42);
    let mut group = c.benchmark_group("swap");
    group.sample_size(10);
    for k in [5usize, 20, 50] {
        let build_start = init_build(&matrix, k).unwrap();
        for algorithm in [
            OptAlgorithm::Pam,
            OptAlgorithm::FastPam1,
            OptAlgorithm::EagerPam,
            OptAlgorithm::FasterPam,
            OptAlgorithm::Alternating,
        ] {
            let config = OptimizerConfig::new(algorithm);
            group.bench_with_input(
                BenchmarkId::new(format!("{algorithm:?}"), k),
                &k,
                |b, _| {
                    b.iter(|| optimize(&matrix, build_start.clone(), &config).unwrap());
                },
            );
        }
    }
    group.finish();
}

fn swap_phase_random_start(c: &mut Criterion) {
    let matrix = blob_matrix(800, 5, 20, 42);
    let k = 20;
    let start = init_random(&matrix, k, 7).unwrap();
    let mut group = c.benchmark_group("swap-random-start");
    group.sample_size(10);
    for algorithm in [OptAlgorithm::Pam, OptAlgorithm::FasterPam] {
        let config = OptimizerConfig::new(algorithm);
        group.bench_function(format!("{algorithm:?}"), |b| {
            b.iter(|| optimize(&matrix, start.clone(), &config).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, swap_phase, swap_phase_random_start);
criterion_main!(benches);
