//! Multi-threaded diffusion driver.
//!
//! Each round fills the next belief vector in fixed-size chunks handed to a
//! rayon pool. Chunk boundaries do not depend on the worker count and every
//! chunk is a pure function of the previous vector, so the output is
//! bitwise identical at any `--threads` setting.

use anyhow::Result;
use rayon::prelude::*;

use echograph_core::diffusion::{step_range, DiffusionConfig, SeedSet};
use echograph_core::graph::BeliefNetwork;

const CHUNK: usize = 4096;

/// Worker pool with `threads` workers; zero means "let rayon decide".
pub fn build_pool(threads: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()?)
}

pub fn diffuse_parallel(
    pool: &rayon::ThreadPool,
    network: &BeliefNetwork,
    seeds: &SeedSet,
    config: &DiffusionConfig,
) -> Vec<f64> {
    assert!(config.iterations >= 1);
    let n = network.node_count();
    let mut prev = vec![0.0f64; n];
    for &s in seeds.members() {
        prev[s as usize] = 1.0;
    }
    let mut next = vec![0.0f64; n];
    pool.install(|| {
        for _ in 0..config.iterations {
            {
                let prev_ref = &prev;
                next.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                    step_range(
                        network,
                        config.mode,
                        seeds.mask(),
                        prev_ref,
                        (ci * CHUNK) as u32,
                        chunk,
                    );
                });
            }
            std::mem::swap(&mut prev, &mut next);
        }
    });
    prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use echograph_core::diffusion::diffuse;
    use echograph_core::synth::synth_repost_graph;

    #[test]
    fn parallel_matches_serial_bitwise_at_any_width() {
        let graph = synth_repost_graph(10_000, 60_000, 21);
        let net = graph.to_belief_network();
        let seeds = SeedSet::from_indices(net.node_count(), (0..200).map(|i| i * 37));
        let config = DiffusionConfig::default();
        let serial = diffuse(&net, &seeds, &config);
        for threads in [1usize, 4, 8] {
            let pool = build_pool(threads).unwrap();
            let parallel = diffuse_parallel(&pool, &net, &seeds, &config);
            assert_eq!(serial, parallel, "threads={threads}");
        }
    }
}
