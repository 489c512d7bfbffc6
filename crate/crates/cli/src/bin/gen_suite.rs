//! Regenerates the bundled benchmark suite under `data/orlib/`: random
//! connected graphs in the standard p-median text format, plus a sidecar of
//! exact optima computed by exhaustive enumeration.
//!
//! Usage: `gen-suite [output-dir]` (default `data/orlib`). Deterministic:
//! re-running reproduces the committed files byte for byte.

use medoids_core::exhaustive::brute_force_optimum;
use medoids_core::ingest::{graph_to_matrix, parse_orlib};
use medoids_core::synthetic::random_connected_graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

struct Spec {
    name: &'static str,
    n: usize,
    m: usize,
    p: usize,
    max_cost: u32,
    seed: u64,
    /// Compute the exact optimum by enumeration (feasible C(n, p) only).
    exact: bool,
}

const SUITE: &[Spec] = &[
    // small-n high-k instances: these separate the swap optimizers most
    // (many swaps needed from random starts) while staying enumerable
    Spec { name: "synth30a", n: 30, m: 65, p: 10, max_cost: 30, seed: 501, exact: true },
    Spec { name: "synth30b", n: 30, m: 65, p: 10, max_cost: 30, seed: 502, exact: true },
    Spec { name: "synth32a", n: 32, m: 70, p: 11, max_cost: 30, seed: 511, exact: true },
    Spec { name: "synth32b", n: 32, m: 70, p: 11, max_cost: 30, seed: 512, exact: true },
    Spec { name: "synth34a", n: 34, m: 75, p: 12, max_cost: 30, seed: 521, exact: true },
    Spec { name: "synth34b", n: 34, m: 75, p: 12, max_cost: 30, seed: 522, exact: true },
    Spec { name: "synth50a", n: 50, m: 110, p: 7, max_cost: 30, seed: 101, exact: true },
    Spec { name: "synth50b", n: 50, m: 110, p: 7, max_cost: 30, seed: 102, exact: true },
    Spec { name: "synth50c", n: 50, m: 110, p: 7, max_cost: 30, seed: 103, exact: true },
    Spec { name: "synth50d", n: 50, m: 110, p: 7, max_cost: 30, seed: 104, exact: true },
    Spec { name: "synth60a", n: 60, m: 140, p: 6, max_cost: 40, seed: 201, exact: true },
    Spec { name: "synth60b", n: 60, m: 140, p: 6, max_cost: 40, seed: 202, exact: true },
    Spec { name: "synth60c", n: 60, m: 140, p: 6, max_cost: 40, seed: 203, exact: true },
    Spec { name: "synth60d", n: 60, m: 140, p: 6, max_cost: 40, seed: 204, exact: true },
    Spec { name: "synth75a", n: 75, m: 170, p: 5, max_cost: 50, seed: 301, exact: true },
    Spec { name: "synth75b", n: 75, m: 170, p: 5, max_cost: 50, seed: 302, exact: true },
    Spec { name: "synth75c", n: 75, m: 170, p: 5, max_cost: 50, seed: 303, exact: true },
    Spec { name: "synth75d", n: 75, m: 170, p: 5, max_cost: 50, seed: 304, exact: true },
    Spec { name: "synth100a", n: 100, m: 200, p: 5, max_cost: 60, seed: 401, exact: true },
    // large instances: enumeration is infeasible here, so no sidecar optima;
    // these exist to exercise iteration-count and timing behavior at n >> k
    Spec { name: "synth150a", n: 150, m: 320, p: 20, max_cost: 60, seed: 601, exact: false },
    Spec { name: "synth150b", n: 150, m: 320, p: 20, max_cost: 60, seed: 602, exact: false },
    Spec { name: "synth180a", n: 180, m: 380, p: 24, max_cost: 60, seed: 611, exact: false },
    Spec { name: "synth180b", n: 180, m: 380, p: 24, max_cost: 60, seed: 612, exact: false },
    Spec { name: "synth200a", n: 200, m: 420, p: 28, max_cost: 60, seed: 621, exact: false },
    Spec { name: "synth200b", n: 200, m: 420, p: 28, max_cost: 60, seed: 622, exact: false },
    Spec { name: "synth240a", n: 240, m: 500, p: 32, max_cost: 60, seed: 631, exact: false },
    Spec { name: "synth240b", n: 240, m: 500, p: 32, max_cost: 60, seed: 632, exact: false },
];

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data/orlib"));
    std::fs::create_dir_all(&out_dir).expect("create output directory");

    let mut sidecar = String::from(
        "# Exact optima for the bundled synthetic p-median suite.\n\
         # Values computed by exhaustive enumeration over all C(n, k) medoid\n\
         # sets (gen-suite binary); regenerate with `cargo run --release -p\n\
         # medoids-cli --bin gen-suite`.\n",
    );

    for spec in SUITE {
        let t0 = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let edges = random_connected_graph(spec.n, spec.m, spec.max_cost, &mut rng);

        let mut text = format!("{} {} {}\n", spec.n, edges.len(), spec.p);
        for (i, j, cost) in &edges {
            writeln!(text, "{i} {j} {cost}").unwrap();
        }
        // round-trip through the parser before trusting the file
        let graph = parse_orlib(&text).expect("generated file must parse");
        let matrix = graph_to_matrix(&graph).expect("generated graph must be connected");
        let path = out_dir.join(format!("{}.txt", spec.name));
        std::fs::write(&path, &text).expect("write instance file");

        if spec.exact {
            let (medoids, optimum) = brute_force_optimum(&matrix, spec.p);
            writeln!(sidecar, "{} {}", spec.name, optimum).unwrap();
            eprintln!(
                "{}: n={} m={} p={} optimum={} medoids={:?} ({:.1}s)",
                spec.name,
                spec.n,
                edges.len(),
                spec.p,
                optimum,
                medoids,
                t0.elapsed().as_secs_f64()
            );
        } else {
            eprintln!(
                "{}: n={} m={} p={} (no exact optimum, {:.1}s)",
                spec.name,
                spec.n,
                edges.len(),
                spec.p,
                t0.elapsed().as_secs_f64()
            );
        }
    }

    std::fs::write(out_dir.join("optima.txt"), sidecar).expect("write optima sidecar");
    eprintln!("wrote {} instances to {}", SUITE.len(), out_dir.display());
}
