//! Deterministic synthetic corpora for property tests and benchmarks.
//!
//! Networks are planted-community G(n, p) digraphs: every ordered pair of
//! users inside a community reposts with probability `intra_rate`, every
//! other ordered pair with probability `cross_rate`. Pair membership is
//! decided by geometric skip-sampling, which draws the same distribution as
//! per-pair Bernoulli trials in time proportional to the number of
//! successes. All draws come from derived [`CounterRng`] streams, so a
//! config generates byte-identical corpora on every run.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::graph::{GraphDiagnostics, RepostGraph};
use crate::math;
use crate::records::{PostKind, PostRecord, UserId, UserRecord};
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_users: u32,
    /// Planted community sizes; members repost each other at `intra_rate`.
    pub communities: Vec<u32>,
    pub intra_rate: f64,
    pub cross_rate: f64,
    /// Originals per user, drawn uniformly from `posts_min..=posts_max`.
    pub posts_min: u32,
    pub posts_max: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_users: 100,
            communities: alloc::vec![20],
            intra_rate: 0.2,
            cross_rate: 0.01,
            posts_min: 1,
            posts_max: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthError {
    CommunitiesExceedUsers,
    RateOutOfRange,
    BadPostCounts,
}

impl core::fmt::Display for SynthError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SynthError::CommunitiesExceedUsers => {
                write!(f, "community sizes sum to more than n_users")
            }
            SynthError::RateOutOfRange => write!(f, "repost rates must lie in [0, 1]"),
            SynthError::BadPostCounts => {
                write!(f, "posts_min must satisfy 1 <= posts_min <= posts_max")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SynthError {}

/// Generated corpus plus the planted ground truth (community per user;
/// `None` for background users).
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub posts: Vec<PostRecord>,
    pub users: Vec<UserRecord>,
    pub communities: Vec<(UserId, Option<u32>)>,
}

const BASE_TIME: i64 = 1_600_000_000;
const DAY: i64 = 86_400;

fn user_name(i: u32) -> String {
    format!("u{i:08}")
}

/// Emit each index in `[0, space)` independently with probability `p`, in
/// ascending order, consuming one uniform draw per emitted index.
fn skip_sample(space: u64, p: f64, rng: &mut CounterRng, mut emit: impl FnMut(u64)) {
    if space == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for j in 0..space {
            emit(j);
        }
        return;
    }
    let ln_q = math::ln(1.0 - p);
    let mut next: u64 = 0;
    loop {
        let u = rng.next_f64();
        let skip = (math::ln(1.0 - u) / ln_q) as u64;
        if skip >= space - next {
            return;
        }
        next += skip;
        emit(next);
        next += 1;
        if next >= space {
            return;
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.communities.iter().map(|&s| s as u64).sum::<u64>() > self.n_users as u64 {
            return Err(SynthError::CommunitiesExceedUsers);
        }
        if !(0.0..=1.0).contains(&self.intra_rate) || !(0.0..=1.0).contains(&self.cross_rate) {
            return Err(SynthError::RateOutOfRange);
        }
        if self.posts_min < 1 || self.posts_min > self.posts_max {
            return Err(SynthError::BadPostCounts);
        }
        Ok(())
    }

    /// Community of each user: members are assigned contiguously from user 0.
    fn community_of(&self) -> Vec<Option<u32>> {
        let mut out = alloc::vec![None; self.n_users as usize];
        let mut next = 0usize;
        for (c, &size) in self.communities.iter().enumerate() {
            for slot in out.iter_mut().skip(next).take(size as usize) {
                *slot = Some(c as u32);
            }
            next += size as usize;
        }
        out
    }
}

pub fn synth_network(config: &SynthConfig) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let n = config.n_users;
    let root = CounterRng::new(config.seed);
    let community = config.community_of();

    let mut reg_rng = root.derive(1);
    let mut posts_rng = root.derive(2);
    let mut social_rng = root.derive(3);
    let mut bio_rng = root.derive(4);

    let mut users = Vec::with_capacity(n as usize);
    let mut originals_per_user = Vec::with_capacity(n as usize);
    let mut posts = Vec::new();
    for i in 0..n {
        let id = UserId::new(user_name(i));
        let age_days = reg_rng.below(300) as i64;
        let registered_at = BASE_TIME - age_days * DAY;
        let followers = social_rng.below(1_000);
        let followees = social_rng.below(500);
        let bio = (bio_rng.next_f64() < 0.5).then(|| format!("synthetic account {i}"));
        users.push(UserRecord {
            id: id.clone(),
            registered_at: Some(registered_at),
            follower_count: Some(followers),
            followee_count: Some(followees),
            bio,
        });
        let count = config.posts_min + posts_rng.below((config.posts_max - config.posts_min + 1) as u64) as u32;
        originals_per_user.push(count);
        for k in 0..count {
            posts.push(PostRecord {
                id: format!("p{i:08}_{k}"),
                author: id.clone(),
                kind: PostKind::Original,
                parent_id: None,
                root_author: None,
                created_at: registered_at + (k as i64 + 1) * 3_600,
                body: Some(format!("synthetic post {k} by user {i}")),
            });
        }
    }

    let add_repost = |src: u32, dst: u32, posts: &mut Vec<PostRecord>| {
        posts.push(PostRecord {
            id: format!("rp{src:08}x{dst:08}"),
            author: UserId::new(user_name(src)),
            kind: PostKind::Repost,
            parent_id: Some(format!("p{dst:08}_0")),
            root_author: Some(UserId::new(user_name(dst))),
            created_at: BASE_TIME + (src as i64 % 97) * 60,
            body: None,
        });
    };

    // Intra-community pairs, one derived stream per community.
    let mut start = 0u64;
    for (c, &size) in config.communities.iter().enumerate() {
        let size = size as u64;
        let space = size * size.saturating_sub(1);
        let mut rng = root.derive(0x100 + c as u64);
        skip_sample(space, config.intra_rate, &mut rng, |idx| {
            let src_off = idx / (size - 1);
            let rem = idx % (size - 1);
            let dst_off = if rem >= src_off { rem + 1 } else { rem };
            add_repost((start + src_off) as u32, (start + dst_off) as u32, &mut posts);
        });
        start += size;
    }

    // Everything else: sample over the full ordered-pair space and discard
    // pairs that fall inside one community (those were handled above).
    let n64 = n as u64;
    let space = n64 * n64.saturating_sub(1);
    let mut cross_rng = root.derive(5);
    skip_sample(space, config.cross_rate, &mut cross_rng, |idx| {
        let src = (idx / (n64 - 1)) as u32;
        let rem = idx % (n64 - 1);
        let dst = if rem >= src as u64 { rem + 1 } else { rem } as u32;
        let same = matches!(
            (community[src as usize], community[dst as usize]),
            (Some(a), Some(b)) if a == b
        );
        if !same {
            add_repost(src, dst, &mut posts);
        }
    });

    let communities = (0..n)
        .map(|i| (UserId::new(user_name(i)), community[i as usize]))
        .collect();

    Ok(SynthOutput {
        posts,
        users,
        communities,
    })
}

/// Benchmark fixture: a repost graph with `n_nodes` users and roughly
/// `n_edges` sampled directed edges (duplicate pairs merge their weight),
/// bypassing record generation entirely.
pub fn synth_repost_graph(n_nodes: u32, n_edges: u64, seed: u64) -> RepostGraph {
    let mut rng = CounterRng::new(seed).derive(0xE);
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(n_edges as usize);
    let n = n_nodes as u64;
    for _ in 0..n_edges {
        let src = rng.below(n) as u32;
        let mut dst = rng.below(n - 1) as u32;
        if dst >= src {
            dst += 1;
        }
        pairs.push((src, dst));
    }
    pairs.sort_unstable();
    let mut edges: Vec<(u32, u32, u64)> = Vec::with_capacity(pairs.len());
    for pair in pairs {
        match edges.last_mut() {
            Some(last) if (last.0, last.1) == pair => last.2 += 1,
            _ => edges.push((pair.0, pair.1, 1)),
        }
    }
    let ids: Vec<UserId> = (0..n_nodes).map(|i| UserId::new(user_name(i))).collect();
    let mut loops_rng = CounterRng::new(seed).derive(0xF);
    let self_loops: Vec<u64> = (0..n_nodes).map(|_| 1 + loops_rng.below(4)).collect();
    RepostGraph::from_sorted_edges(ids, self_loops, &edges, GraphDiagnostics::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{diffuse, DiffusionConfig, SeedSet};
    use crate::graph::{RepostGraphBuilder, SelfLoopPolicy};
    use crate::rng::CounterRng;

    #[test]
    fn same_seed_is_reproducible() {
        let config = SynthConfig::default();
        let a = synth_network(&config).unwrap();
        let b = synth_network(&config).unwrap();
        assert_eq!(a.posts, b.posts);
        assert_eq!(a.users, b.users);
        assert_eq!(a.communities, b.communities);
        let other = synth_network(&SynthConfig {
            seed: 99,
            ..config
        })
        .unwrap();
        assert_ne!(a.posts, other.posts);
    }

    #[test]
    fn zero_rates_give_self_loops_only() {
        let config = SynthConfig {
            intra_rate: 0.0,
            cross_rate: 0.0,
            ..SynthConfig::default()
        };
        let out = synth_network(&config).unwrap();
        assert!(out.posts.iter().all(|p| p.kind == PostKind::Original));
        let mut b = RepostGraphBuilder::new(SelfLoopPolicy::default());
        for p in &out.posts {
            b.observe(p);
        }
        let g = b.finish();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn infeasible_configs_rejected() {
        let bad = SynthConfig {
            n_users: 10,
            communities: alloc::vec![8, 8],
            ..SynthConfig::default()
        };
        assert_eq!(bad.validate(), Err(SynthError::CommunitiesExceedUsers));
        let bad = SynthConfig {
            intra_rate: 1.5,
            ..SynthConfig::default()
        };
        assert_eq!(bad.validate(), Err(SynthError::RateOutOfRange));
        let bad = SynthConfig {
            posts_min: 0,
            ..SynthConfig::default()
        };
        assert_eq!(bad.validate(), Err(SynthError::BadPostCounts));
    }

    #[test]
    fn edge_counts_concentrate_near_expectation() {
        // Bernoulli(p) over N pairs: |count - Np| <= 5 * sqrt(Np(1-p)).
        let space: u64 = 300 * 299;
        let p = 0.05;
        for seed in 0..5u64 {
            let mut count = 0u64;
            let mut rng = CounterRng::new(seed);
            skip_sample(space, p, &mut rng, |_| count += 1);
            let mean = space as f64 * p;
            let sigma = (mean * (1.0 - p)).sqrt();
            assert!(
                (count as f64 - mean).abs() <= 5.0 * sigma,
                "seed {seed}: {count} outside {mean} +- 5*{sigma}"
            );
        }
    }

    #[test]
    fn skip_sample_full_rate_emits_everything() {
        let mut seen = Vec::new();
        let mut rng = CounterRng::new(1);
        skip_sample(10, 1.0, &mut rng, |j| seen.push(j));
        assert_eq!(seen, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn planted_community_holds_belief_after_seeding() {
        let mut failures = 0;
        for seed in 0..100u64 {
            let config = SynthConfig {
                n_users: 60,
                communities: alloc::vec![15],
                intra_rate: 0.4,
                cross_rate: 0.02,
                posts_min: 1,
                posts_max: 3,
                seed,
            };
            let out = synth_network(&config).unwrap();
            let mut b = RepostGraphBuilder::new(SelfLoopPolicy::default());
            for p in &out.posts {
                b.observe(p);
            }
            let g = b.finish();
            let net = g.to_belief_network();
            let planted: Vec<u32> = out
                .communities
                .iter()
                .filter(|(_, c)| c.is_some())
                .filter_map(|(id, _)| g.node_index(id.as_str()))
                .collect();
            let seeds = SeedSet::from_indices(net.node_count(), planted.iter().copied());
            let beliefs = diffuse(&net, &seeds, &DiffusionConfig::default());
            let inside: f64 =
                planted.iter().map(|&i| beliefs[i as usize]).sum::<f64>() / planted.len() as f64;
            let outside_count = net.node_count() - planted.len();
            let outside: f64 = beliefs
                .iter()
                .enumerate()
                .filter(|(i, _)| !seeds.contains(*i as u32))
                .map(|(_, &b)| b)
                .sum::<f64>()
                / outside_count as f64;
            if inside <= outside {
                failures += 1;
            }
        }
        assert_eq!(failures, 0);
    }

    #[test]
    fn synth_graph_has_requested_shape() {
        let g = synth_repost_graph(1_000, 5_000, 3);
        assert_eq!(g.node_count(), 1_000);
        // Duplicate pairs merge, so the distinct count is slightly lower.
        assert!(g.edge_count() > 4_900 && g.edge_count() <= 5_000);
        let total_weight: u64 = (0..1_000u32).map(|v| g.out_weight(v)).sum();
        assert_eq!(total_weight, 5_000);
        let net = g.to_belief_network();
        assert!(net.max_row_sum_error() <= 1e-12);
    }
}
