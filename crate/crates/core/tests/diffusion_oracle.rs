//! Sparse diffusion vs. the dense matrix oracle, plus the order- and
//! partition-independence guarantees the sparse path promises.

mod common;

use common::{dense_belief_matrix, dense_diffuse, random_graph};
use echograph_core::diffusion::{diffuse, step_range, DiffusionConfig, DiffusionMode, SeedSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_seed_mask(rng: &mut StdRng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.gen_bool(0.2)).collect()
}

#[test]
fn sparse_matches_dense_oracle_on_random_networks() {
    let mut rng = StdRng::seed_from_u64(0xD1FF);
    for case in 0..200 {
        let n = rng.gen_range(2..=50);
        let density = rng.gen_range(0.02..0.3);
        let graph = random_graph(&mut rng, n, density);
        let net = graph.to_belief_network();
        let w = dense_belief_matrix(&graph);
        let seed_mask = random_seed_mask(&mut rng, n as usize);
        let seeds = SeedSet::from_indices(
            n as usize,
            seed_mask
                .iter()
                .enumerate()
                .filter(|(_, &s)| s)
                .map(|(i, _)| i as u32),
        );
        let iterations = rng.gen_range(1..=5);
        for mode in [DiffusionMode::Standard, DiffusionMode::Clamped] {
            let sparse = diffuse(&net, &seeds, &DiffusionConfig { iterations, mode });
            let dense = dense_diffuse(&w, &seed_mask, mode == DiffusionMode::Clamped, iterations);
            for (node, (s, d)) in sparse.iter().zip(&dense).enumerate() {
                assert!(
                    (s - d).abs() <= 1e-12,
                    "case {case} node {node} mode {mode:?}: sparse {s} dense {d}"
                );
            }
        }
    }
}

#[test]
fn clamped_dominates_standard_elementwise() {
    let mut rng = StdRng::seed_from_u64(0xC1A);
    for _ in 0..100 {
        let n = rng.gen_range(2..=40);
        let graph = random_graph(&mut rng, n, 0.15);
        let net = graph.to_belief_network();
        let members: Vec<u32> = (0..n).filter(|_| rng.gen_bool(0.25)).collect();
        let seeds = SeedSet::from_indices(n as usize, members);
        for iterations in 1..=4 {
            let clamped = diffuse(
                &net,
                &seeds,
                &DiffusionConfig {
                    iterations,
                    mode: DiffusionMode::Clamped,
                },
            );
            let standard = diffuse(
                &net,
                &seeds,
                &DiffusionConfig {
                    iterations,
                    mode: DiffusionMode::Standard,
                },
            );
            for (c, s) in clamped.iter().zip(&standard) {
                assert!(c >= s, "clamped {c} < standard {s}");
            }
        }
    }
}

#[test]
fn beliefs_stay_within_unit_interval() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.gen_range(2..=30);
        let graph = random_graph(&mut rng, n, 0.2);
        let net = graph.to_belief_network();
        let seeds = SeedSet::from_indices(n as usize, (0..n).filter(|_| rng.gen_bool(0.5)));
        for mode in [DiffusionMode::Standard, DiffusionMode::Clamped] {
            let beliefs = diffuse(&net, &seeds, &DiffusionConfig { iterations: 5, mode });
            assert!(beliefs.iter().all(|&b| (0.0..=1.0).contains(&b)));
        }
    }
}

#[test]
fn nodes_beyond_seed_horizon_stay_exactly_zero() {
    // Chain 0 <- 1 <- 2 <- ... (node k reposts node k-1), seed node 0:
    // after t iterations only nodes within t influence hops move.
    let n = 10u32;
    let edges: Vec<(u32, u32, u64)> = (1..n).map(|i| (i, i - 1, 1)).collect();
    let graph = common::graph_from(n, &edges, &vec![1; n as usize]);
    let net = graph.to_belief_network();
    let seeds = SeedSet::from_indices(n as usize, [0]);
    for iterations in 1..=4u32 {
        let beliefs = diffuse(
            &net,
            &seeds,
            &DiffusionConfig {
                iterations,
                mode: DiffusionMode::Clamped,
            },
        );
        for node in (iterations + 1)..n {
            assert_eq!(
                beliefs[node as usize], 0.0,
                "node {node} reachable only in {} hops moved after {iterations} iterations",
                node
            );
        }
        assert!(beliefs[iterations.min(n - 1) as usize] > 0.0);
    }
}

#[test]
fn row_stochastic_on_random_graphs() {
    let mut rng = StdRng::seed_from_u64(0x505);
    for _ in 0..100 {
        let n = rng.gen_range(1..=60);
        let graph = random_graph(&mut rng, n, 0.1);
        let net = graph.to_belief_network();
        assert!(net.max_row_sum_error() <= 1e-12);
        assert_eq!(net.entry_count(), graph.edge_count() + graph.node_count());
    }
}

#[test]
fn thousand_node_rows_sum_to_one() {
    let graph = echograph_core::synth::synth_repost_graph(1_000, 6_000, 42);
    let net = graph.to_belief_network();
    assert!(net.max_row_sum_error() <= 1e-12);
}

#[test]
fn chunked_step_is_bitwise_identical_to_full_step() {
    let mut rng = StdRng::seed_from_u64(0xC4);
    let graph = random_graph(&mut rng, 40, 0.2);
    let net = graph.to_belief_network();
    let n = net.node_count();
    let seeds = SeedSet::from_indices(n, (0..n as u32).filter(|_| rng.gen_bool(0.3)));
    let prev: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();

    let mut full = vec![0.0f64; n];
    step_range(&net, DiffusionMode::Clamped, seeds.mask(), &prev, 0, &mut full);

    for chunk_size in [1usize, 3, 7, 16, 64] {
        let mut chunked = vec![0.0f64; n];
        let mut start = 0usize;
        for chunk in chunked.chunks_mut(chunk_size) {
            step_range(
                &net,
                DiffusionMode::Clamped,
                seeds.mask(),
                &prev,
                start as u32,
                chunk,
            );
            start += chunk.len();
        }
        assert_eq!(full, chunked, "chunk size {chunk_size} changed the result");
    }
}

#[test]
fn diffusion_is_invariant_to_post_order() {
    // Graphs built from shuffled posts produce identical networks and hence
    // bitwise-identical beliefs.
    use echograph_core::graph::{RepostGraphBuilder, SelfLoopPolicy};
    use echograph_core::synth::{synth_network, SynthConfig};
    let out = synth_network(&SynthConfig {
        n_users: 80,
        communities: vec![20],
        intra_rate: 0.3,
        cross_rate: 0.02,
        posts_min: 1,
        posts_max: 4,
        seed: 5,
    })
    .unwrap();

    let build = |posts: &[echograph_core::records::PostRecord]| {
        let mut b = RepostGraphBuilder::new(SelfLoopPolicy::default());
        for p in posts {
            b.observe(p);
        }
        b.finish()
    };
    let forward = build(&out.posts);
    let mut shuffled = out.posts.clone();
    shuffled.reverse();
    let mid = shuffled.len() / 2;
    shuffled.swap(0, mid);
    let backward = build(&shuffled);
    assert_eq!(forward, backward);

    let seeds_fwd = SeedSet::from_indices(forward.node_count(), [0, 5, 9]);
    let a = diffuse(&forward.to_belief_network(), &seeds_fwd, &DiffusionConfig::default());
    let b = diffuse(&backward.to_belief_network(), &seeds_fwd, &DiffusionConfig::default());
    assert_eq!(a, b);
}
