//! Initialization benchmarks: the six strategies at fixed n, k.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use medoids_core::init::{initialize, InitMethod};
use medoids_core::synthetic::blob_matrix;

fn initializers(c: &mut Criterion) {
    let matrix = blob_matrix(800, 5, 20, 42);
    let mut group = c.benchmark_group("init");
    group.sample_size(10);
    for k in [5usize, 20] {
        for method in InitMethod::ALL {
            group.bench_with_input(
                BenchmarkId::new(method.name(), k),
                &k,
                |b, &k| {
                    b.iter(|| initialize(&matrix, k, method, 42).unwrap());
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, initializers);
criterion_main!(benches);
