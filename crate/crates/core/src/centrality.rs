//! Structural centrality measures over the repost graph.
//!
//! Self-loops never participate here: degree centralities count repost
//! edges only, shortest-path measures treat the directed graph as
//! unweighted, and PageRank walks the repost edges (weighted by repost
//! count by default).
//!
//! Betweenness is Brandes' algorithm. Below `exact_threshold` nodes every
//! node acts as a source; above it a seeded sample of pivot sources is used
//! and the accumulated dependencies are scaled by `n / pivots` (Brandes &
//! Pich style estimation). Scores are raw pair-dependency sums unless
//! `normalized` is set, in which case they are divided by
//! `(n - 1) * (n - 2)`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::RepostGraph;
use crate::math;
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "in" => Some(Direction::In),
            "out" => Some(Direction::Out),
            _ => None,
        }
    }
}

/// Degree centrality: degree divided by `n - 1`. `weighted` sums repost
/// counts instead of counting distinct partners.
pub fn degree_centrality(graph: &RepostGraph, direction: Direction, weighted: bool) -> Vec<f64> {
    let n = graph.node_count();
    if n <= 1 {
        return vec![0.0; n];
    }
    let denom = (n - 1) as f64;
    (0..n as u32)
        .map(|v| {
            let d = match (direction, weighted) {
                (Direction::In, false) => graph.in_degree(v),
                (Direction::In, true) => graph.in_weight(v),
                (Direction::Out, false) => graph.out_degree(v),
                (Direction::Out, true) => graph.out_weight(v),
            };
            d as f64 / denom
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    /// L1 convergence tolerance.
    pub tolerance: f64,
    pub max_iterations: u32,
    /// Distribute rank proportionally to repost counts instead of uniformly
    /// over distinct partners.
    pub weighted: bool,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            weighted: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankFailure {
    pub residual: f64,
    pub iterations: u32,
}

impl core::fmt::Display for PageRankFailure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "pagerank did not converge: residual {:e} after {} iterations",
            self.residual, self.iterations
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PageRankFailure {}

/// Power iteration with uniform teleport and uniform dangling-mass
/// redistribution. The result sums to one.
pub fn pagerank(graph: &RepostGraph, config: &PageRankConfig) -> Result<Vec<f64>, PageRankFailure> {
    let n = graph.node_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let inv_n = 1.0 / n as f64;
    let out_mass: Vec<f64> = (0..n as u32)
        .map(|v| {
            if config.weighted {
                graph.out_weight(v) as f64
            } else {
                graph.out_degree(v) as f64
            }
        })
        .collect();

    let mut rank = vec![inv_n; n];
    let mut next = vec![0.0f64; n];
    let d = config.damping;
    for _ in 1..=config.max_iterations {
        let mut dangling = 0.0f64;
        for v in 0..n {
            if out_mass[v] == 0.0 {
                dangling += rank[v];
            }
        }
        let base = (1.0 - d) * inv_n + d * dangling * inv_n;
        for (v, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0f64;
            for (src, w) in graph.in_edges(v as u32) {
                let share = if config.weighted {
                    w as f64 / out_mass[src as usize]
                } else {
                    1.0 / out_mass[src as usize]
                };
                acc += rank[src as usize] * share;
            }
            *slot = base + d * acc;
        }
        let residual: f64 = rank
            .iter()
            .zip(&next)
            .map(|(&a, &b)| math::abs(a - b))
            .sum();
        core::mem::swap(&mut rank, &mut next);
        if residual < config.tolerance {
            return Ok(rank);
        }
    }
    let residual: f64 = rank
        .iter()
        .zip(&next)
        .map(|(&a, &b)| math::abs(a - b))
        .sum();
    Err(PageRankFailure {
        residual,
        iterations: config.max_iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetweennessConfig {
    /// Node count at or below which every source is used.
    pub exact_threshold: usize,
    /// Pivot sample size above the threshold.
    pub pivots: usize,
    pub seed: u64,
    pub normalized: bool,
}

impl Default for BetweennessConfig {
    fn default() -> Self {
        Self {
            exact_threshold: 100_000,
            pivots: 256,
            seed: 0,
            normalized: false,
        }
    }
}

/// Single-source Brandes pass: BFS from `source`, then dependency
/// accumulation in reverse BFS order. Adds into `scores`.
fn brandes_pass(graph: &RepostGraph, source: u32, scores: &mut [f64]) {
    let n = graph.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut predecessors: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    dist[source as usize] = 0;
    sigma[source as usize] = 1.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in graph.out_neighbors(v) {
            let wu = w as usize;
            if dist[wu] == u32::MAX {
                dist[wu] = dist[v as usize] + 1;
                queue.push_back(w);
            }
            if dist[wu] == dist[v as usize] + 1 {
                sigma[wu] += sigma[v as usize];
                predecessors[wu].push(v);
            }
        }
    }

    for &w in order.iter().rev() {
        let coeff = (1.0 + delta[w as usize]) / sigma[w as usize];
        for &v in &predecessors[w as usize] {
            delta[v as usize] += sigma[v as usize] * coeff;
        }
        if w != source {
            scores[w as usize] += delta[w as usize];
        }
    }
}

/// Exact betweenness over every source.
pub fn betweenness_exact(graph: &RepostGraph, normalized: bool) -> Vec<f64> {
    let n = graph.node_count();
    let mut scores = vec![0.0f64; n];
    for source in 0..n as u32 {
        brandes_pass(graph, source, &mut scores);
    }
    finalize_betweenness(scores, n, normalized, 1.0)
}

/// Pivot-sampled estimate: dependencies from `pivots` seeded sources,
/// scaled by `n / pivots`. Pivots are processed in sampled order so the
/// accumulation is reproducible.
pub fn betweenness_sampled(
    graph: &RepostGraph,
    pivots: usize,
    seed: u64,
    normalized: bool,
) -> Vec<f64> {
    let n = graph.node_count();
    let k = pivots.min(n);
    if k == 0 {
        return vec![0.0; n];
    }
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut rng = CounterRng::new(seed).derive(0xB37);
    let mut scores = vec![0.0f64; n];
    for i in 0..k {
        let j = i + rng.below((n - i) as u64) as usize;
        pool.swap(i, j);
        brandes_pass(graph, pool[i], &mut scores);
    }
    finalize_betweenness(scores, n, normalized, n as f64 / k as f64)
}

fn finalize_betweenness(mut scores: Vec<f64>, n: usize, normalized: bool, scale: f64) -> Vec<f64> {
    let norm = if normalized && n > 2 {
        1.0 / ((n - 1) as f64 * (n - 2) as f64)
    } else {
        1.0
    };
    for s in scores.iter_mut() {
        *s *= scale * norm;
    }
    scores
}

/// Betweenness with automatic exact/sampled selection.
pub fn betweenness(graph: &RepostGraph, config: &BetweennessConfig) -> Vec<f64> {
    if graph.node_count() <= config.exact_threshold {
        betweenness_exact(graph, config.normalized)
    } else {
        betweenness_sampled(graph, config.pivots, config.seed, config.normalized)
    }
}
