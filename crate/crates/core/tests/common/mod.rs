//! Shared fixture builders and independent oracles for the integration
//! tests. The oracles deliberately avoid the library's sparse code paths:
//! diffusion is checked against dense matrix iteration and betweenness
//! against exhaustive shortest-path enumeration.

use echograph_core::graph::{RepostGraph, RepostGraphBuilder, SelfLoopPolicy};
use echograph_core::records::{PostKind, PostRecord, UserId};
use rand::rngs::StdRng;
use rand::Rng;

pub fn node_name(i: u32) -> String {
    format!("u{i:03}")
}

/// Build a repost graph from explicit weighted edges and per-node authored
/// counts. Node names are zero-padded numbers, so node index == position.
pub fn graph_from(n: u32, edges: &[(u32, u32, u64)], self_loops: &[u64]) -> RepostGraph {
    assert_eq!(self_loops.len(), n as usize);
    let mut builder = RepostGraphBuilder::new(SelfLoopPolicy::Originals);
    let mut serial = 0u64;
    for (i, &count) in self_loops.iter().enumerate() {
        for _ in 0..count {
            serial += 1;
            builder.observe(&PostRecord {
                id: format!("p{serial}"),
                author: UserId::new(node_name(i as u32)),
                kind: PostKind::Original,
                parent_id: None,
                root_author: None,
                created_at: 0,
                body: None,
            });
        }
        // Ensure every node exists even with zero authored posts.
        if count == 0 {
            serial += 1;
            builder.observe(&PostRecord {
                id: format!("p{serial}"),
                author: UserId::new(node_name(i as u32)),
                kind: PostKind::Repost,
                parent_id: Some("never-resolves".to_string()),
                root_author: None,
                created_at: 0,
                body: None,
            });
        }
    }
    for &(src, dst, weight) in edges {
        for _ in 0..weight {
            serial += 1;
            builder.observe(&PostRecord {
                id: format!("r{serial}"),
                author: UserId::new(node_name(src)),
                kind: PostKind::Repost,
                parent_id: Some(format!("x{serial}")),
                root_author: Some(UserId::new(node_name(dst))),
                created_at: 0,
                body: None,
            });
        }
    }
    let graph = builder.finish();
    assert_eq!(graph.node_count(), n as usize);
    graph
}

/// Random digraph: about `density * n * (n-1)` distinct weighted edges plus
/// random authored counts (some zero).
pub fn random_graph(rng: &mut StdRng, n: u32, density: f64) -> RepostGraph {
    let mut edges = Vec::new();
    for src in 0..n {
        for dst in 0..n {
            if src != dst && rng.gen_bool(density) {
                edges.push((src, dst, rng.gen_range(1..=5)));
            }
        }
    }
    let self_loops: Vec<u64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    graph_from(n, &edges, &self_loops)
}

/// Dense row-stochastic matrix derived straight from the repost graph:
/// `w[i][j]` is how much node `i` listens to node `j`.
pub fn dense_belief_matrix(graph: &RepostGraph) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut w = vec![vec![0.0f64; n]; n];
    for i in 0..n as u32 {
        let mut total = graph.self_loop(i);
        for (_, c) in graph.out_edges(i) {
            total += c;
        }
        let row = &mut w[i as usize];
        if total == 0 {
            row[i as usize] = 1.0;
            continue;
        }
        row[i as usize] = graph.self_loop(i) as f64 / total as f64;
        for (j, c) in graph.out_edges(i) {
            row[j as usize] = c as f64 / total as f64;
        }
    }
    w
}

/// Dense belief iteration: `b <- W b`, with seeds pinned back to one in
/// clamped mode.
pub fn dense_diffuse(
    w: &[Vec<f64>],
    seed_mask: &[bool],
    clamped: bool,
    iterations: u32,
) -> Vec<f64> {
    let n = w.len();
    let mut b: Vec<f64> = seed_mask.iter().map(|&s| if s { 1.0 } else { 0.0 }).collect();
    for _ in 0..iterations {
        let mut next = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += w[i][j] * b[j];
            }
            next[i] = acc;
        }
        if clamped {
            for (i, &s) in seed_mask.iter().enumerate() {
                if s {
                    next[i] = 1.0;
                }
            }
        }
        b = next;
    }
    b
}

/// All-pairs betweenness by explicit enumeration of every shortest path.
pub fn betweenness_by_enumeration(graph: &RepostGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut scores = vec![0.0f64; n];
    for s in 0..n as u32 {
        // BFS distances from s.
        let mut dist = vec![u32::MAX; n];
        dist[s as usize] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in graph.out_neighbors(v) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        for t in 0..n as u32 {
            if t == s || dist[t as usize] == u32::MAX {
                continue;
            }
            let mut paths: Vec<Vec<u32>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &w in graph.out_neighbors(last) {
                    if dist[w as usize] == dist[last as usize] + 1
                        && dist[w as usize] <= dist[t as usize]
                    {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            let share = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    scores[v as usize] += share;
                }
            }
        }
    }
    scores
}
