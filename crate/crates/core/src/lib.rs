//! k-medoids clustering around a dense dissimilarity matrix.
//!
//! Implements the PAM family — original PAM SWAP, FastPAM1 (identical
//! results, without the inner loop over medoids), EagerPAM, FasterPAM
//! (eager swapping), the alternating heuristic — with six initialization
//! strategies, the CLARA/CLARANS subsampling variants, p-median instance
//! ingestion and a benchmark harness.

pub mod error;
pub mod eval;
pub mod exhaustive;
pub mod ingest;
pub mod init;
pub mod matrix;
pub mod model;
pub mod optimize;
pub mod sampling;
pub mod synthetic;

pub use error::{Error, Result};
pub use eval::{
    aggregate, bench_run, derive_seed, normalized_loss, random_baseline, BenchAggregate,
    BenchReport, BenchRow, Method,
};
pub use ingest::{
    graph_to_matrix, load_optima, load_orlib_instance, load_vectors, parse_orlib, OrlibGraph,
    ProblemInstance,
};
pub use matrix::{Dissimilarity, DissimilarityMatrix, Metric, SubsetView};
pub use model::{
    assign_nearest, medoid_of_set, swap_delta_oracle, total_deviation, AssignmentCache,
    ClusteringResult, MedoidSet, RemovalLossTable,
};
pub use optimize::{optimize, OptAlgorithm, OptimizerConfig};
pub use sampling::{
    clara, clarans, fastclara, fastclarans, ClaraConfig, ClaransConfig, SampleSizeRule,
};
