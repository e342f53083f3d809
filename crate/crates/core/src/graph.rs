//! Weighted repost network and its belief-network transform.
//!
//! The repost graph has one node per user, a directed edge `(a, b)` whose
//! weight counts how many of `b`'s posts `a` reposted, and a self-loop per
//! node counting the user's own authored content. The belief network reverses
//! every edge (the reposter listens to the original author), adds the
//! self-loop, and normalizes each node's incoming weights to sum to one, so
//! each row is a probability distribution over influencers.
//!
//! Node indices are canonical: after construction the node table is sorted
//! by user id, so two graphs built from the same posts in any order are
//! structurally identical, influence lists are summed in a fixed order, and
//! downstream results are bitwise reproducible.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::records::{PostKind, PostRecord, UserId};

/// What counts toward a node's self-loop (its own authored content).
///
/// Reposts are already represented as edges, so the default keeps them out of
/// the self-loop while still crediting replies as authored content.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfLoopPolicy {
    Originals,
    OriginalsAndReplies,
    All,
}

impl Default for SelfLoopPolicy {
    fn default() -> Self {
        SelfLoopPolicy::OriginalsAndReplies
    }
}

impl SelfLoopPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            SelfLoopPolicy::Originals => "originals",
            SelfLoopPolicy::OriginalsAndReplies => "originals+replies",
            SelfLoopPolicy::All => "all",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "originals" => Some(SelfLoopPolicy::Originals),
            "originals+replies" => Some(SelfLoopPolicy::OriginalsAndReplies),
            "all" => Some(SelfLoopPolicy::All),
            _ => None,
        }
    }
}

/// Counters for records that could not contribute edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GraphDiagnostics {
    /// Reposts whose original author could not be resolved (missing parent
    /// chain and no root author).
    pub unresolved_reposts: u64,
    /// Self-reposts folded into the reposter's self-loop instead of an edge.
    pub self_reposts_folded: u64,
}

const NO_USER: u32 = u32::MAX;
const NO_POST: u32 = u32::MAX;
/// Longest repost chain followed before a repost is declared unresolved.
const MAX_CHAIN: u32 = 64;

/// Streaming builder for [`RepostGraph`].
///
/// `observe` never retains post bodies, so arbitrarily large dumps can be
/// folded in from a reader. Reposts are resolved when [`finish`] runs:
/// a repost credits the root author when the record names one, otherwise the
/// parent chain is followed through intermediate reposts to the author of
/// the original post; reposts whose chain leaves the corpus are counted in
/// the diagnostics and dropped.
///
/// [`finish`]: RepostGraphBuilder::finish
#[derive(Debug)]
pub struct RepostGraphBuilder {
    policy: SelfLoopPolicy,
    user_index: HashMap<UserId, u32>,
    users: Vec<UserId>,
    self_counts: Vec<u64>,
    post_index: HashMap<String, u32>,
    post_author: Vec<u32>,
    post_kind: Vec<Option<PostKind>>,
    post_parent: Vec<u32>,
    post_root: Vec<u32>,
    reposts: Vec<u32>,
}

impl RepostGraphBuilder {
    pub fn new(policy: SelfLoopPolicy) -> Self {
        Self {
            policy,
            user_index: HashMap::new(),
            users: Vec::new(),
            self_counts: Vec::new(),
            post_index: HashMap::new(),
            post_author: Vec::new(),
            post_kind: Vec::new(),
            post_parent: Vec::new(),
            post_root: Vec::new(),
            reposts: Vec::new(),
        }
    }

    fn intern_user(&mut self, id: &UserId) -> u32 {
        if let Some(&idx) = self.user_index.get(id.as_str()) {
            return idx;
        }
        let idx = self.users.len() as u32;
        self.users.push(id.clone());
        self.self_counts.push(0);
        self.user_index.insert(id.clone(), idx);
        idx
    }

    fn intern_post(&mut self, id: &str) -> u32 {
        if let Some(&idx) = self.post_index.get(id) {
            return idx;
        }
        let idx = self.post_author.len() as u32;
        self.post_author.push(NO_USER);
        self.post_kind.push(None);
        self.post_parent.push(NO_POST);
        self.post_root.push(NO_USER);
        self.post_index.insert(String::from(id), idx);
        idx
    }

    pub fn observe(&mut self, post: &PostRecord) {
        let author = self.intern_user(&post.author);
        let pidx = self.intern_post(&post.id) as usize;
        self.post_author[pidx] = author;
        self.post_kind[pidx] = Some(post.kind);
        if let Some(parent) = &post.parent_id {
            let parent_idx = self.intern_post(parent);
            self.post_parent[pidx] = parent_idx;
        }
        if let Some(root) = &post.root_author {
            let root_idx = self.intern_user(root);
            self.post_root[pidx] = root_idx;
        }

        let counts_as_self = match post.kind {
            PostKind::Original => true,
            PostKind::Reply => self.policy != SelfLoopPolicy::Originals,
            PostKind::Repost => self.policy == SelfLoopPolicy::All,
        };
        if counts_as_self {
            self.self_counts[author as usize] += 1;
        }
        if post.kind == PostKind::Repost {
            self.reposts.push(pidx as u32);
        }
    }

    /// Resolve the original author credited by the repost at `pidx`.
    fn resolve_target(&self, pidx: u32) -> Option<u32> {
        let mut cur = pidx;
        for _ in 0..MAX_CHAIN {
            if self.post_root[cur as usize] != NO_USER {
                return Some(self.post_root[cur as usize]);
            }
            let parent = self.post_parent[cur as usize];
            if parent == NO_POST {
                return None;
            }
            match self.post_kind[parent as usize] {
                // Parent never appeared in the corpus.
                None => return None,
                Some(PostKind::Repost) => cur = parent,
                Some(_) => {
                    let author = self.post_author[parent as usize];
                    return (author != NO_USER).then_some(author);
                }
            }
        }
        None
    }

    pub fn finish(self) -> RepostGraph {
        let mut diagnostics = GraphDiagnostics::default();
        let mut edge_counts: HashMap<(u32, u32), u64> = HashMap::new();
        let mut self_counts = self.self_counts.clone();
        for &pidx in &self.reposts {
            let reposter = self.post_author[pidx as usize];
            match self.resolve_target(pidx) {
                None => diagnostics.unresolved_reposts += 1,
                Some(target) if target == reposter => {
                    self_counts[reposter as usize] += 1;
                    diagnostics.self_reposts_folded += 1;
                }
                Some(target) => *edge_counts.entry((reposter, target)).or_insert(0) += 1,
            }
        }

        // Canonical ordering: node index == rank of the user id.
        let n = self.users.len();
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by(|&a, &b| self.users[a as usize].cmp(&self.users[b as usize]));
        let mut rank = vec![0u32; n];
        for (new_idx, &old_idx) in order.iter().enumerate() {
            rank[old_idx as usize] = new_idx as u32;
        }

        let ids: Vec<UserId> = order
            .iter()
            .map(|&old| self.users[old as usize].clone())
            .collect();
        let self_loops: Vec<u64> = order
            .iter()
            .map(|&old| self_counts[old as usize])
            .collect();

        let mut edges: Vec<(u32, u32, u64)> = edge_counts
            .into_iter()
            .map(|((src, dst), w)| (rank[src as usize], rank[dst as usize], w))
            .collect();
        edges.sort_unstable_by_key(|&(src, dst, _)| (src, dst));

        RepostGraph::from_sorted_edges(ids, self_loops, &edges, diagnostics)
    }
}

/// Directed weighted repost network in CSR form, stored in both directions.
///
/// `out` rows are indexed by the reposting user (`out` edge `(a, b)` means
/// `a` reposted `b`); `in` rows index the same edges by the reposted author.
/// Node ids are sorted ascending and the index of an id is its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RepostGraph {
    ids: Vec<UserId>,
    self_loops: Vec<u64>,
    out_offsets: Vec<u64>,
    out_targets: Vec<u32>,
    out_weights: Vec<u64>,
    in_offsets: Vec<u64>,
    in_sources: Vec<u32>,
    in_weights: Vec<u64>,
    diagnostics: GraphDiagnostics,
}

/// Structural problem found while assembling a graph from raw parts
/// (typically a corrupt cache file).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidGraph(pub &'static str);

impl core::fmt::Display for InvalidGraph {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid graph structure: {}", self.0)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InvalidGraph {}

impl RepostGraph {
    /// Build from edges already sorted by `(src, dst)` with positive weights
    /// and no self-pairs. Internal constructor shared by the builder and the
    /// synthetic generator.
    pub(crate) fn from_sorted_edges(
        ids: Vec<UserId>,
        self_loops: Vec<u64>,
        edges: &[(u32, u32, u64)],
        diagnostics: GraphDiagnostics,
    ) -> Self {
        let n = ids.len();
        let m = edges.len();
        let mut out_offsets = vec![0u64; n + 1];
        let mut out_targets = Vec::with_capacity(m);
        let mut out_weights = Vec::with_capacity(m);
        let mut in_degree = vec![0u64; n];
        for &(src, dst, w) in edges {
            out_offsets[src as usize + 1] += 1;
            out_targets.push(dst);
            out_weights.push(w);
            in_degree[dst as usize] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }

        let mut in_offsets = vec![0u64; n + 1];
        for i in 0..n {
            in_offsets[i + 1] = in_offsets[i] + in_degree[i];
        }
        let mut cursor: Vec<u64> = in_offsets[..n].to_vec();
        let mut in_sources = vec![0u32; m];
        let mut in_weights = vec![0u64; m];
        // Edges arrive sorted by (src, dst), so filling per destination keeps
        // every in-row sorted by source.
        for &(src, dst, w) in edges {
            let slot = cursor[dst as usize] as usize;
            in_sources[slot] = src;
            in_weights[slot] = w;
            cursor[dst as usize] += 1;
        }

        RepostGraph {
            ids,
            self_loops,
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
            diagnostics,
        }
    }

    /// Reassemble a graph from raw CSR arrays, validating every structural
    /// invariant. Used by the cache loader.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        ids: Vec<UserId>,
        self_loops: Vec<u64>,
        out_offsets: Vec<u64>,
        out_targets: Vec<u32>,
        out_weights: Vec<u64>,
        in_offsets: Vec<u64>,
        in_sources: Vec<u32>,
        in_weights: Vec<u64>,
        diagnostics: GraphDiagnostics,
    ) -> Result<Self, InvalidGraph> {
        let n = ids.len();
        let m = out_targets.len();
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(InvalidGraph("node ids not sorted and unique"));
        }
        if self_loops.len() != n {
            return Err(InvalidGraph("self-loop table length mismatch"));
        }
        for (offsets, name) in [
            (&out_offsets, "out offsets"),
            (&in_offsets, "in offsets"),
        ] {
            if offsets.len() != n + 1
                || offsets[0] != 0
                || offsets[n] != m as u64
                || offsets.windows(2).any(|w| w[0] > w[1])
            {
                let _ = name;
                return Err(InvalidGraph("offset table malformed"));
            }
        }
        if out_weights.len() != m || in_sources.len() != m || in_weights.len() != m {
            return Err(InvalidGraph("edge array length mismatch"));
        }
        if out_targets.iter().chain(in_sources.iter()).any(|&v| v as usize >= n) {
            return Err(InvalidGraph("edge endpoint out of range"));
        }
        if out_weights.iter().chain(in_weights.iter()).any(|&w| w == 0) {
            return Err(InvalidGraph("zero-weight edge"));
        }
        let graph = RepostGraph {
            ids,
            self_loops,
            out_offsets,
            out_targets,
            out_weights,
            in_offsets,
            in_sources,
            in_weights,
            diagnostics,
        };
        for i in 0..n as u32 {
            if graph.out_row(i).0.windows(2).any(|w| w[0] >= w[1])
                || graph.in_row(i).0.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(InvalidGraph("adjacency row not sorted"));
            }
            if graph.out_row(i).0.iter().any(|&t| t == i) {
                return Err(InvalidGraph("self-pair stored as edge"));
            }
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of distinct directed repost pairs.
    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn ids(&self) -> &[UserId] {
        &self.ids
    }

    pub fn user_id(&self, node: u32) -> &UserId {
        &self.ids[node as usize]
    }

    /// Rank of `id` in the sorted node table, if present.
    pub fn node_index(&self, id: &str) -> Option<u32> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn self_loop(&self, node: u32) -> u64 {
        self.self_loops[node as usize]
    }

    pub fn self_loops(&self) -> &[u64] {
        &self.self_loops
    }

    fn out_row(&self, node: u32) -> (&[u32], &[u64]) {
        let lo = self.out_offsets[node as usize] as usize;
        let hi = self.out_offsets[node as usize + 1] as usize;
        (&self.out_targets[lo..hi], &self.out_weights[lo..hi])
    }

    fn in_row(&self, node: u32) -> (&[u32], &[u64]) {
        let lo = self.in_offsets[node as usize] as usize;
        let hi = self.in_offsets[node as usize + 1] as usize;
        (&self.in_sources[lo..hi], &self.in_weights[lo..hi])
    }

    /// Users this node reposted, with repost counts, sorted by target.
    pub fn out_edges(&self, node: u32) -> impl Iterator<Item = (u32, u64)> + '_ {
        let (t, w) = self.out_row(node);
        t.iter().copied().zip(w.iter().copied())
    }

    /// Users who reposted this node, with repost counts, sorted by source.
    pub fn in_edges(&self, node: u32) -> impl Iterator<Item = (u32, u64)> + '_ {
        let (s, w) = self.in_row(node);
        s.iter().copied().zip(w.iter().copied())
    }

    pub fn out_neighbors(&self, node: u32) -> &[u32] {
        self.out_row(node).0
    }

    pub fn in_neighbors(&self, node: u32) -> &[u32] {
        self.in_row(node).0
    }

    /// Distinct users this node reposted.
    pub fn out_degree(&self, node: u32) -> u64 {
        self.out_offsets[node as usize + 1] - self.out_offsets[node as usize]
    }

    /// Distinct users who reposted this node.
    pub fn in_degree(&self, node: u32) -> u64 {
        self.in_offsets[node as usize + 1] - self.in_offsets[node as usize]
    }

    /// Total reposts made by this node (edge-weight sum).
    pub fn out_weight(&self, node: u32) -> u64 {
        self.out_row(node).1.iter().sum()
    }

    /// Total reposts received by this node.
    pub fn in_weight(&self, node: u32) -> u64 {
        self.in_row(node).1.iter().sum()
    }

    pub fn diagnostics(&self) -> GraphDiagnostics {
        self.diagnostics
    }

    pub fn out_offsets(&self) -> &[u64] {
        &self.out_offsets
    }

    pub fn out_targets(&self) -> &[u32] {
        &self.out_targets
    }

    pub fn out_weights(&self) -> &[u64] {
        &self.out_weights
    }

    pub fn in_offsets(&self) -> &[u64] {
        &self.in_offsets
    }

    pub fn in_sources(&self) -> &[u32] {
        &self.in_sources
    }

    pub fn in_weights(&self) -> &[u64] {
        &self.in_weights
    }

    /// Derive the row-stochastic belief network (see module docs).
    pub fn to_belief_network(&self) -> BeliefNetwork {
        let n = self.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u64);
        let mut sources = Vec::with_capacity(self.edge_count() + n);
        let mut weights = Vec::with_capacity(self.edge_count() + n);
        for node in 0..n as u32 {
            let (targets, counts) = self.out_row(node);
            let self_count = self.self_loops[node as usize];
            let total: u64 = self_count + counts.iter().sum::<u64>();
            if total == 0 {
                // Isolated node with no authored content: it listens only to
                // itself.
                sources.push(node);
                weights.push(1.0);
            } else {
                let denom = total as f64;
                let split = targets.partition_point(|&t| t < node);
                for (&t, &c) in targets[..split].iter().zip(&counts[..split]) {
                    sources.push(t);
                    weights.push(c as f64 / denom);
                }
                sources.push(node);
                weights.push(self_count as f64 / denom);
                for (&t, &c) in targets[split..].iter().zip(&counts[split..]) {
                    sources.push(t);
                    weights.push(c as f64 / denom);
                }
            }
            offsets.push(sources.len() as u64);
        }
        BeliefNetwork {
            offsets,
            sources,
            weights,
        }
    }
}

/// Row-stochastic influence structure: `row(i)` lists the users node `i`
/// listens to (always including itself) with weights summing to one, sorted
/// by source index so weighted sums have a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefNetwork {
    offsets: Vec<u64>,
    sources: Vec<u32>,
    weights: Vec<f64>,
}

impl BeliefNetwork {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Total stored influence entries (distinct repost pairs plus one self
    /// entry per node).
    pub fn entry_count(&self) -> usize {
        self.sources.len()
    }

    pub fn row(&self, node: u32) -> (&[u32], &[f64]) {
        let lo = self.offsets[node as usize] as usize;
        let hi = self.offsets[node as usize + 1] as usize;
        (&self.sources[lo..hi], &self.weights[lo..hi])
    }

    /// Largest deviation of any row sum from one.
    pub fn max_row_sum_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for node in 0..self.node_count() as u32 {
            let (_, weights) = self.row(node);
            let sum: f64 = weights.iter().sum();
            let err = crate::math::abs(sum - 1.0);
            if err > worst {
                worst = err;
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::PostKind;
    use alloc::string::ToString;

    fn original(id: &str, author: &str) -> PostRecord {
        PostRecord {
            id: id.to_string(),
            author: UserId::from(author),
            kind: PostKind::Original,
            parent_id: None,
            root_author: None,
            created_at: 0,
            body: None,
        }
    }

    fn repost(id: &str, author: &str, parent: &str, root: Option<&str>) -> PostRecord {
        PostRecord {
            id: id.to_string(),
            author: UserId::from(author),
            kind: PostKind::Repost,
            parent_id: Some(parent.to_string()),
            root_author: root.map(UserId::from),
            created_at: 0,
            body: None,
        }
    }

    /// Fixture used throughout: v reposts u twice, w reposts v once, authored
    /// counts u=2, v=1, w=1.
    pub(crate) fn three_node_posts() -> Vec<PostRecord> {
        vec![
            original("u1", "u"),
            original("u2", "u"),
            original("v1", "v"),
            original("w1", "w"),
            repost("r1", "v", "u1", Some("u")),
            repost("r2", "v", "u2", Some("u")),
            repost("r3", "w", "v1", Some("v")),
        ]
    }

    pub(crate) fn build(posts: &[PostRecord]) -> RepostGraph {
        let mut b = RepostGraphBuilder::new(SelfLoopPolicy::default());
        for p in posts {
            b.observe(p);
        }
        b.finish()
    }

    #[test]
    fn three_node_fixture_edges_and_self_loops() {
        let g = build(&three_node_posts());
        assert_eq!(g.node_count(), 3);
        let (u, v, w) = (
            g.node_index("u").unwrap(),
            g.node_index("v").unwrap(),
            g.node_index("w").unwrap(),
        );
        assert_eq!(g.out_edges(v).collect::<Vec<_>>(), vec![(u, 2)]);
        assert_eq!(g.out_edges(w).collect::<Vec<_>>(), vec![(v, 1)]);
        assert_eq!(g.out_edges(u).count(), 0);
        assert_eq!(
            [g.self_loop(u), g.self_loop(v), g.self_loop(w)],
            [2, 1, 1]
        );
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.in_edges(u).collect::<Vec<_>>(), vec![(v, 2)]);
    }

    #[test]
    fn no_reposts_yields_self_loops_only() {
        let g = build(&[original("a", "x"), original("b", "y")]);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 2);
        assert!(g.self_loops().iter().all(|&c| c == 1));
    }

    #[test]
    fn repost_of_repost_credits_root_author() {
        // u posts p1; v reposts it (no root recorded); w reposts v's repost.
        let posts = vec![
            original("p1", "u"),
            repost("p2", "v", "p1", None),
            repost("p3", "w", "p2", None),
        ];
        let g = build(&posts);
        let (u, w) = (g.node_index("u").unwrap(), g.node_index("w").unwrap());
        assert_eq!(g.out_edges(w).collect::<Vec<_>>(), vec![(u, 1)]);
        assert_eq!(g.diagnostics().unresolved_reposts, 0);
    }

    #[test]
    fn unresolvable_repost_is_counted_and_dropped() {
        let posts = vec![repost("p2", "v", "missing", None)];
        let g = build(&posts);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.diagnostics().unresolved_reposts, 1);
    }

    #[test]
    fn self_repost_folds_into_self_loop() {
        let posts = vec![original("p1", "u"), repost("p2", "u", "p1", None)];
        let g = build(&posts);
        let u = g.node_index("u").unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.self_loop(u), 2);
        assert_eq!(g.diagnostics().self_reposts_folded, 1);
    }

    #[test]
    fn self_loop_policy_controls_authored_counts() {
        let mut posts = vec![original("p1", "u")];
        posts.push(PostRecord {
            id: "p2".to_string(),
            author: UserId::from("u"),
            kind: PostKind::Reply,
            parent_id: Some("p1".to_string()),
            root_author: None,
            created_at: 0,
            body: None,
        });
        posts.push(repost("p3", "u", "x1", Some("x")));

        let count = |policy| {
            let mut b = RepostGraphBuilder::new(policy);
            for p in &posts {
                b.observe(p);
            }
            let g = b.finish();
            g.self_loop(g.node_index("u").unwrap())
        };
        assert_eq!(count(SelfLoopPolicy::Originals), 1);
        assert_eq!(count(SelfLoopPolicy::OriginalsAndReplies), 2);
        assert_eq!(count(SelfLoopPolicy::All), 3);
    }

    #[test]
    fn permutation_invariant_over_post_order() {
        let mut posts = three_node_posts();
        let forward = build(&posts);
        posts.reverse();
        let backward = build(&posts);
        assert_eq!(forward, backward);
    }

    #[test]
    fn belief_network_matches_worked_normalization() {
        let g = build(&three_node_posts());
        let net = g.to_belief_network();
        let (u, v, w) = (
            g.node_index("u").unwrap(),
            g.node_index("v").unwrap(),
            g.node_index("w").unwrap(),
        );
        assert_eq!(net.row(u), (&[u][..], &[1.0][..]));
        let (sources, weights) = net.row(v);
        assert_eq!(sources, &[u, v]);
        assert_eq!(weights, &[2.0 / 3.0, 1.0 / 3.0]);
        let (sources, weights) = net.row(w);
        assert_eq!(sources, &[v, w]);
        assert_eq!(weights, &[0.5, 0.5]);
    }

    #[test]
    fn isolated_zero_post_node_gets_unit_self_weight() {
        // x is referenced as a root author but never authors anything itself.
        let posts = vec![original("p1", "u"), repost("p2", "u", "q", Some("x"))];
        let g = build(&posts);
        let x = g.node_index("x").unwrap();
        assert_eq!(g.self_loop(x), 0);
        let net = g.to_belief_network();
        assert_eq!(net.row(x), (&[x][..], &[1.0][..]));
        assert!(net.max_row_sum_error() <= 1e-12);
    }

    #[test]
    fn influence_entry_count_is_pairs_plus_nodes() {
        let g = build(&three_node_posts());
        let net = g.to_belief_network();
        assert_eq!(net.entry_count(), g.edge_count() + g.node_count());
    }

    #[test]
    fn node_set_preserved_by_transform() {
        let g = build(&three_node_posts());
        let net = g.to_belief_network();
        assert_eq!(net.node_count(), g.node_count());
    }

    #[test]
    fn from_parts_rejects_corrupt_structure() {
        let g = build(&three_node_posts());
        let bad = RepostGraph::from_parts(
            g.ids().to_vec(),
            g.self_loops().to_vec(),
            g.out_offsets().to_vec(),
            g.out_targets().to_vec(),
            vec![0; g.edge_count()], // zero weights
            g.in_offsets().to_vec(),
            g.in_sources().to_vec(),
            g.in_weights().to_vec(),
            g.diagnostics(),
        );
        assert!(bad.is_err());
    }
}
