//! Seed selection and DeGroot-style belief diffusion.
//!
//! Diffusion starts from a 0/1 belief vector (seed accounts at one, everyone
//! else at zero) and repeatedly replaces each node's belief with the weighted
//! average of its influencers' beliefs under the row-stochastic
//! [`BeliefNetwork`]. Two variants:
//!
//! * `Standard` — every node updates, seeds included, so seed beliefs can
//!   decay as they average with their neighbourhoods.
//! * `Clamped` — seed beliefs are pinned back to one after every round
//!   (equivalently: never updated), which keeps the accounts that earned
//!   seed status at full strength throughout.
//!
//! The update for node `i` sums `w[i][j] * b[j]` over the node's influence
//! row in source order, so results are bitwise identical no matter how nodes
//! are partitioned across workers. One consequence worth knowing: because
//! updates are convex combinations of values in `[0, 1]`, beliefs stay in
//! `[0, 1]`, and clamped-mode beliefs dominate standard-mode beliefs
//! node-for-node on identical inputs.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::graph::{BeliefNetwork, RepostGraph};
use crate::records::{PostRecord, UserId};
use crate::scoring::PostScore;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffusionMode {
    Standard,
    Clamped,
}

impl DiffusionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiffusionMode::Standard => "standard",
            DiffusionMode::Clamped => "clamped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(DiffusionMode::Standard),
            "clamped" => Some(DiffusionMode::Clamped),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    /// Number of update rounds; at least one.
    pub iterations: u32,
    pub mode: DiffusionMode,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            mode: DiffusionMode::Clamped,
        }
    }
}

/// Seed accounts, kept both as a sorted index list and a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    members: Vec<u32>,
    mask: Vec<bool>,
}

impl SeedSet {
    pub fn from_indices(node_count: usize, indices: impl IntoIterator<Item = u32>) -> Self {
        let mut mask = vec![false; node_count];
        for idx in indices {
            mask[idx as usize] = true;
        }
        let members = (0..node_count as u32).filter(|&i| mask[i as usize]).collect();
        Self { members, mask }
    }

    /// Resolve user ids against the graph's node table; ids not present in
    /// the graph are returned separately so callers can warn about them.
    pub fn from_user_ids<'a>(
        graph: &RepostGraph,
        ids: impl IntoIterator<Item = &'a UserId>,
    ) -> (Self, Vec<UserId>) {
        let mut dropped = Vec::new();
        let mut members = Vec::new();
        for id in ids {
            match graph.node_index(id.as_str()) {
                Some(idx) => members.push(idx),
                None => dropped.push(id.clone()),
            }
        }
        (Self::from_indices(graph.node_count(), members), dropped)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: u32) -> bool {
        self.mask[node as usize]
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}

/// Compute new beliefs for the node range starting at `first_node`, writing
/// one value per `out` slot. Exposed so driver code can split the node space
/// into chunks and fill them in parallel; chunking cannot change any output
/// value because each slot depends only on `prev`.
pub fn step_range(
    network: &BeliefNetwork,
    mode: DiffusionMode,
    seed_mask: &[bool],
    prev: &[f64],
    first_node: u32,
    out: &mut [f64],
) {
    for (k, slot) in out.iter_mut().enumerate() {
        let node = first_node + k as u32;
        if mode == DiffusionMode::Clamped && seed_mask[node as usize] {
            *slot = 1.0;
            continue;
        }
        let (sources, weights) = network.row(node);
        let mut acc = 0.0f64;
        for (&src, &w) in sources.iter().zip(weights) {
            acc += w * prev[src as usize];
        }
        *slot = acc;
    }
}

/// Run `config.iterations` rounds of belief averaging from the seed set.
/// Returns one belief per node, indexed like the network.
pub fn diffuse(network: &BeliefNetwork, seeds: &SeedSet, config: &DiffusionConfig) -> Vec<f64> {
    assert!(config.iterations >= 1, "iterations must be at least 1");
    let n = network.node_count();
    let mut prev = vec![0.0f64; n];
    for &s in seeds.members() {
        prev[s as usize] = 1.0;
    }
    let mut next = vec![0.0f64; n];
    for _ in 0..config.iterations {
        step_range(network, config.mode, seeds.mask(), &prev, 0, &mut next);
        core::mem::swap(&mut prev, &mut next);
    }
    prev
}

/// Outcome of seed selection.
#[derive(Debug, Clone)]
pub struct SeedSelection {
    pub seeds: SeedSet,
    /// Scores that referenced post ids absent from the corpus.
    pub unknown_posts: u64,
}

/// Streaming seed selector: feed `(author, score)` pairs, then `finish`.
///
/// A user becomes a seed with at least `min_posts` posts scoring strictly
/// above `tau`.
#[derive(Debug)]
pub struct SeedSelector {
    tau: f64,
    min_posts: u64,
    counts: HashMap<u32, u64>,
    unknown_posts: u64,
}

impl SeedSelector {
    pub fn new(tau: f64, min_posts: u64) -> Self {
        Self {
            tau,
            min_posts,
            counts: HashMap::new(),
            unknown_posts: 0,
        }
    }

    pub fn observe(&mut self, author: Option<u32>, score: f64) {
        match author {
            None => self.unknown_posts += 1,
            Some(a) => {
                if score > self.tau {
                    *self.counts.entry(a).or_insert(0) += 1;
                }
            }
        }
    }

    pub fn finish(self, node_count: usize) -> SeedSelection {
        let members = self
            .counts
            .iter()
            .filter(|&(_, &c)| c >= self.min_posts)
            .map(|(&a, _)| a);
        SeedSelection {
            seeds: SeedSet::from_indices(node_count, members),
            unknown_posts: self.unknown_posts,
        }
    }
}

/// Convenience wrapper joining scores to authors through the post list.
pub fn select_seeds(
    scores: &[PostScore],
    posts: &[PostRecord],
    graph: &RepostGraph,
    tau: f64,
    min_posts: u64,
) -> SeedSelection {
    let author_of: HashMap<&str, Option<u32>> = posts
        .iter()
        .map(|p| (p.id.as_str(), graph.node_index(p.author.as_str())))
        .collect();
    let mut selector = SeedSelector::new(tau, min_posts);
    for score in scores {
        let author = author_of.get(score.post_id.as_str()).copied().flatten();
        selector.observe(author, score.score);
    }
    selector.finish(graph.node_count())
}
