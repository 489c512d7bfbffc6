//! Randomized property tests over the core invariants: cache coherence,
//! oracle agreement, objective monotonicity, and metric properties of
//! shortest-path matrices.

use medoids_core::exhaustive::is_local_optimum;
use medoids_core::ingest::{graph_to_matrix, OrlibGraph};
use medoids_core::model::{
    apply_swap, assign_nearest, change, change_decomposed, removal_loss, swap_delta_oracle,
    total_deviation, MedoidSet,
};
use medoids_core::optimize::{optimize, OptAlgorithm, OptimizerConfig};
use medoids_core::synthetic::{random_connected_graph, random_integer_matrix};
use medoids_core::{Dissimilarity, DissimilarityMatrix, SubsetView};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_instance() -> impl Strategy<Value = (DissimilarityMatrix, usize, u64)> {
    (4usize..30, 1u32..50, any::<u64>()).prop_map(|(n, max, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_integer_matrix(n, max, &mut rng);
        (m, n, seed)
    })
}

fn arb_medoids(n: usize, k: usize, seed: u64) -> MedoidSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rand::Rng::random_range(&mut rng, i..n);
        pool.swap(i, j);
    }
    MedoidSet::new(pool[..k].to_vec(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cache_is_coherent_after_every_swap((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(5);
        let mut medoids = arb_medoids(n, k, seed ^ 1);
        let mut cache = assign_nearest(&matrix, &medoids).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        for _ in 0..5 {
            let slot = rand::Rng::random_range(&mut rng, 0..k);
            let candidate = loop {
                let c = rand::Rng::random_range(&mut rng, 0..n);
                if !medoids.contains(c) {
                    break c;
                }
            };
            apply_swap(&matrix, &mut medoids, &mut cache, slot, candidate).unwrap();
            let fresh = assign_nearest(&matrix, &medoids).unwrap();
            prop_assert_eq!(&cache.nearest, &fresh.nearest);
            prop_assert_eq!(&cache.d_nearest, &fresh.d_nearest);
            prop_assert_eq!(&cache.second, &fresh.second);
            prop_assert_eq!(&cache.d_second, &fresh.d_second);
        }
    }

    #[test]
    fn oracle_delta_matches_recomputation((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(5);
        let medoids = arb_medoids(n, k, seed ^ 3);
        let cache = assign_nearest(&matrix, &medoids).unwrap();
        let td = total_deviation(&matrix, &medoids);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        for _ in 0..5 {
            let slot = rand::Rng::random_range(&mut rng, 0..k);
            let candidate = loop {
                let c = rand::Rng::random_range(&mut rng, 0..n);
                if !medoids.contains(c) {
                    break c;
                }
            };
            let delta = swap_delta_oracle(&matrix, &medoids, &cache, slot, candidate).unwrap();
            let mut swapped = medoids.indices().to_vec();
            swapped[slot] = candidate;
            let after = total_deviation(&matrix, &MedoidSet::new(swapped, n).unwrap());
            // integer matrices: sums are exact
            prop_assert_eq!(td + delta, after);
        }
    }

    #[test]
    fn decomposed_change_equals_four_case(
        d_oc in 0.0f64..100.0,
        dn in 0.0f64..100.0,
        extra in 0.0f64..100.0,
        nearest_is_i in any::<bool>(),
    ) {
        let ds = dn + extra; // second-nearest is never closer than nearest
        let a = change(d_oc, nearest_is_i, dn, ds);
        let b = change_decomposed(d_oc, nearest_is_i, dn, ds);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn optimizers_never_increase_loss((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(4);
        let start = arb_medoids(n, k, seed ^ 5);
        let td0 = total_deviation(&matrix, &start);
        for algorithm in [
            OptAlgorithm::Pam,
            OptAlgorithm::FastPam1,
            OptAlgorithm::EagerPam,
            OptAlgorithm::FasterPam,
            OptAlgorithm::Alternating,
        ] {
            let result = optimize(
                &matrix,
                start.clone(),
                &OptimizerConfig::new(algorithm),
            )
            .unwrap();
            prop_assert!(result.loss <= td0);
            // the reported loss is the recomputed one
            prop_assert_eq!(result.loss, total_deviation(&matrix, &result.medoids));
        }
    }

    #[test]
    fn swap_optimizers_reach_local_optima((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(4);
        let start = arb_medoids(n, k, seed ^ 6);
        for algorithm in [OptAlgorithm::Pam, OptAlgorithm::FasterPam] {
            let result = optimize(
                &matrix,
                start.clone(),
                &OptimizerConfig::new(algorithm),
            )
            .unwrap();
            prop_assert!(is_local_optimum(&matrix, &result.medoids).unwrap());
        }
    }

    #[test]
    fn removal_loss_table_matches_definition((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(5);
        let medoids = arb_medoids(n, k, seed ^ 7);
        let cache = assign_nearest(&matrix, &medoids).unwrap();
        let table = removal_loss(&cache, k);
        for slot in 0..k {
            let expected: f64 = (0..n)
                .filter(|&o| cache.nearest[o] == slot)
                .map(|o| cache.d_second[o] - cache.d_nearest[o])
                .sum();
            prop_assert_eq!(table.0[slot], expected);
        }
    }

    #[test]
    fn shortest_path_matrices_are_metric(n in 5usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = n + rand::Rng::random_range(&mut rng, 0..n);
        let edges = random_connected_graph(n, m, 30, &mut rng);
        let graph = OrlibGraph { n_vertices: n, n_edges: edges.len(), p: 2, edges };
        let matrix = graph_to_matrix(&graph).unwrap();
        for i in 0..n {
            prop_assert_eq!(matrix.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(matrix.get(i, j), matrix.get(j, i));
                for l in 0..n {
                    prop_assert!(matrix.get(i, j) <= matrix.get(i, l) + matrix.get(l, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn total_deviation_is_permutation_invariant((matrix, n, seed) in arb_instance()) {
        let k = 2 + (seed as usize) % (n / 2).max(1).min(5);
        let medoids = arb_medoids(n, k, seed ^ 8);
        let td = total_deviation(&matrix, &medoids);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 9);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rand::Rng::random_range(&mut rng, 0..=i);
            perm.swap(i, j);
        }
        let inverse: Vec<usize> = {
            let mut inv = vec![0; n];
            for (new_idx, &old_idx) in perm.iter().enumerate() {
                inv[old_idx] = new_idx;
            }
            inv
        };
        let view = SubsetView::new(&matrix, perm);
        let mapped = MedoidSet::new(
            medoids.indices().iter().map(|&i| inverse[i]).collect(),
            n,
        )
        .unwrap();
        prop_assert_eq!(total_deviation(&view, &mapped), td);
    }
}
