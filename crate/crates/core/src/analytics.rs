//! Group-level analytics: activity and account statistics, content shares,
//! degree distributions, corpus hate prevalence, and affect aggregation.
//!
//! Conventions shared by every statistic here: the median of an even-sized
//! sample is the lower-middle element, standard deviation is the population
//! form, and the 2.5% tails are trimmed only when exporting distributions
//! for plotting — never before computing means or medians.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::graph::RepostGraph;
use crate::math;
use crate::records::{PostKind, PostRecord, UserRecord};
use crate::centrality::{
    betweenness, degree_centrality, pagerank, BetweennessConfig, Direction, PageRankConfig,
    PageRankFailure,
};
use crate::segmentation::{ActivityProfile, Group, GroupAssignment};

/// Summary statistics over one metric within one group.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricSummary {
    pub count: u64,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    /// Smallest / largest value that survives 2.5% tail trimming.
    pub trim_lo: f64,
    pub trim_hi: f64,
}

impl MetricSummary {
    pub fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_unstable_by(f64::total_cmp);
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let median = values[(n - 1) / 2];
        let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let trimmed = trimmed(&values);
        Some(Self {
            count: n as u64,
            mean,
            median,
            std_dev: math::sqrt(var),
            trim_lo: trimmed[0],
            trim_hi: trimmed[trimmed.len() - 1],
        })
    }
}

/// Drop `floor(0.025 * n)` values from each end of a sorted slice.
pub fn trimmed(sorted: &[f64]) -> &[f64] {
    let k = (sorted.len() as f64 * 0.025) as usize;
    &sorted[k..sorted.len() - k]
}

/// Per-group activity, popularity, and biography statistics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupProfile {
    pub members: u64,
    pub originals: MetricSummary,
    pub replies: MetricSummary,
    pub reposts: MetricSummary,
    pub age_days: MetricSummary,
    /// Follower stats over members whose record carries the count.
    pub followers: Option<MetricSummary>,
    pub followees: Option<MetricSummary>,
    /// Fraction of members with a non-empty biography.
    pub bio_present_fraction: f64,
    /// Biography length (chars) over members that have one.
    pub bio_length: Option<MetricSummary>,
}

/// Activity / popularity / biography statistics per group. Groups without
/// members are absent from the map.
pub fn group_profile_stats(
    assignments: &[GroupAssignment],
    profiles: &[ActivityProfile],
    users: &[UserRecord],
) -> BTreeMap<Group, GroupProfile> {
    let profile_of: HashMap<&str, &ActivityProfile> =
        profiles.iter().map(|p| (p.user_id.as_str(), p)).collect();
    let user_of: HashMap<&str, &UserRecord> =
        users.iter().map(|u| (u.id.as_str(), u)).collect();

    #[derive(Default)]
    struct Acc {
        originals: Vec<f64>,
        replies: Vec<f64>,
        reposts: Vec<f64>,
        age_days: Vec<f64>,
        followers: Vec<f64>,
        followees: Vec<f64>,
        bio_lengths: Vec<f64>,
        with_bio: u64,
        members: u64,
    }

    let mut groups: BTreeMap<Group, Acc> = BTreeMap::new();
    for a in assignments {
        let acc = groups.entry(a.group).or_default();
        acc.members += 1;
        match profile_of.get(a.user_id.as_str()) {
            Some(p) => {
                acc.originals.push(p.n_originals as f64);
                acc.replies.push(p.n_replies as f64);
                acc.reposts.push(p.n_reposts as f64);
                acc.age_days.push(p.age_days);
            }
            None => {
                acc.originals.push(0.0);
                acc.replies.push(0.0);
                acc.reposts.push(0.0);
                acc.age_days.push(0.0);
            }
        }
        if let Some(u) = user_of.get(a.user_id.as_str()) {
            if let Some(f) = u.follower_count {
                acc.followers.push(f as f64);
            }
            if let Some(f) = u.followee_count {
                acc.followees.push(f as f64);
            }
            if let Some(bio) = &u.bio {
                if !bio.is_empty() {
                    acc.with_bio += 1;
                    acc.bio_lengths.push(bio.chars().count() as f64);
                }
            }
        }
    }

    groups
        .into_iter()
        .map(|(group, acc)| {
            let profile = GroupProfile {
                members: acc.members,
                originals: MetricSummary::from_values(acc.originals).unwrap(),
                replies: MetricSummary::from_values(acc.replies).unwrap(),
                reposts: MetricSummary::from_values(acc.reposts).unwrap(),
                age_days: MetricSummary::from_values(acc.age_days).unwrap(),
                followers: MetricSummary::from_values(acc.followers),
                followees: MetricSummary::from_values(acc.followees),
                bio_present_fraction: acc.with_bio as f64 / acc.members as f64,
                bio_length: MetricSummary::from_values(acc.bio_lengths),
            };
            (group, profile)
        })
        .collect()
}

/// One group's share of the active users' content.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShareRow {
    pub n_originals: u64,
    pub n_replies: u64,
    pub n_reposts: u64,
    pub originals: f64,
    pub replies: f64,
    pub reposts: f64,
    pub all: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContentShare {
    pub by_group: BTreeMap<Group, ShareRow>,
    pub total_originals: u64,
    pub total_replies: u64,
    pub total_reposts: u64,
}

/// Content shares across the active groups (inactive users are excluded from
/// both numerators and denominators). Shares of each kind sum to one over
/// the groups present whenever that kind has any content at all.
pub fn content_share(
    assignments: &[GroupAssignment],
    profiles: &[ActivityProfile],
) -> ContentShare {
    let profile_of: HashMap<&str, &ActivityProfile> =
        profiles.iter().map(|p| (p.user_id.as_str(), p)).collect();
    let mut by_group: BTreeMap<Group, ShareRow> = BTreeMap::new();
    let mut totals = (0u64, 0u64, 0u64);
    for a in assignments {
        if a.group == Group::Inactive {
            continue;
        }
        let Some(p) = profile_of.get(a.user_id.as_str()) else {
            continue;
        };
        let row = by_group.entry(a.group).or_default();
        row.n_originals += p.n_originals;
        row.n_replies += p.n_replies;
        row.n_reposts += p.n_reposts;
        totals.0 += p.n_originals;
        totals.1 += p.n_replies;
        totals.2 += p.n_reposts;
    }
    let all_total = totals.0 + totals.1 + totals.2;
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    for row in by_group.values_mut() {
        row.originals = ratio(row.n_originals, totals.0);
        row.replies = ratio(row.n_replies, totals.1);
        row.reposts = ratio(row.n_reposts, totals.2);
        row.all = ratio(row.n_originals + row.n_replies + row.n_reposts, all_total);
    }
    ContentShare {
        by_group,
        total_originals: totals.0,
        total_replies: totals.1,
        total_reposts: totals.2,
    }
}

/// Per-group mean centralities.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CentralityRow {
    pub members_in_graph: u64,
    pub in_degree: f64,
    pub out_degree: f64,
    pub in_degree_weighted: f64,
    pub out_degree_weighted: f64,
    pub betweenness: f64,
    pub pagerank: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CentralityReport {
    pub by_group: BTreeMap<Group, CentralityRow>,
    /// Sum of PageRank over all nodes before group averaging.
    pub pagerank_sum: f64,
    pub betweenness_exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralitySuiteConfig {
    pub pagerank: PageRankConfig,
    pub betweenness: BetweennessConfig,
}

impl Default for CentralitySuiteConfig {
    fn default() -> Self {
        Self {
            pagerank: PageRankConfig::default(),
            betweenness: BetweennessConfig::default(),
        }
    }
}

/// Degree centralities (both variants), betweenness, and PageRank, averaged
/// over each group's members that appear in the graph.
pub fn centrality_suite(
    graph: &RepostGraph,
    assignments: &[GroupAssignment],
    config: &CentralitySuiteConfig,
) -> Result<CentralityReport, PageRankFailure> {
    let id_unweighted = degree_centrality(graph, Direction::In, false);
    let id_weighted = degree_centrality(graph, Direction::In, true);
    let od_unweighted = degree_centrality(graph, Direction::Out, false);
    let od_weighted = degree_centrality(graph, Direction::Out, true);
    let pr = pagerank(graph, &config.pagerank)?;
    let bc = betweenness(graph, &config.betweenness);
    let pagerank_sum = pr.iter().sum();

    #[derive(Default)]
    struct Acc {
        n: u64,
        sums: [f64; 6],
    }
    let mut groups: BTreeMap<Group, Acc> = BTreeMap::new();
    for a in assignments {
        let Some(node) = graph.node_index(a.user_id.as_str()) else {
            continue;
        };
        let v = node as usize;
        let acc = groups.entry(a.group).or_default();
        acc.n += 1;
        for (slot, value) in acc.sums.iter_mut().zip([
            id_unweighted[v],
            od_unweighted[v],
            id_weighted[v],
            od_weighted[v],
            bc[v],
            pr[v],
        ]) {
            *slot += value;
        }
    }

    let by_group = groups
        .into_iter()
        .map(|(group, acc)| {
            let m = acc.n as f64;
            let row = CentralityRow {
                members_in_graph: acc.n,
                in_degree: acc.sums[0] / m,
                out_degree: acc.sums[1] / m,
                in_degree_weighted: acc.sums[2] / m,
                out_degree_weighted: acc.sums[3] / m,
                betweenness: acc.sums[4] / m,
                pagerank: acc.sums[5] / m,
            };
            (group, row)
        })
        .collect();

    Ok(CentralityReport {
        by_group,
        pagerank_sum,
        betweenness_exact: graph.node_count() <= config.betweenness.exact_threshold,
    })
}

/// Empirical probability mass over node degrees, one table per group.
pub fn degree_distribution(
    graph: &RepostGraph,
    assignments: &[GroupAssignment],
    direction: Direction,
) -> BTreeMap<Group, Vec<(u64, f64)>> {
    let mut counts: BTreeMap<Group, BTreeMap<u64, u64>> = BTreeMap::new();
    let mut group_sizes: BTreeMap<Group, u64> = BTreeMap::new();
    for a in assignments {
        let Some(node) = graph.node_index(a.user_id.as_str()) else {
            continue;
        };
        let k = match direction {
            Direction::In => graph.in_degree(node),
            Direction::Out => graph.out_degree(node),
        };
        *counts.entry(a.group).or_default().entry(k).or_insert(0) += 1;
        *group_sizes.entry(a.group).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(group, ks)| {
            let n = group_sizes[&group] as f64;
            let pmf = ks.into_iter().map(|(k, c)| (k, c as f64 / n)).collect();
            (group, pmf)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogBin {
    pub lo: f64,
    /// Exclusive upper edge; always `lo * base` for the positive bins.
    pub hi: f64,
    pub p: f64,
}

/// Collapse a degree pmf into logarithmic bins `[base^i, base^(i+1))`,
/// with a dedicated bin for degree zero.
pub fn log_bin(pmf: &[(u64, f64)], base: f64) -> Vec<LogBin> {
    assert!(base > 1.0, "log binning requires base > 1");
    let mut bins: Vec<LogBin> = Vec::new();
    let zero_mass: f64 = pmf.iter().filter(|&&(k, _)| k == 0).map(|&(_, p)| p).sum();
    if zero_mass > 0.0 {
        bins.push(LogBin {
            lo: 0.0,
            hi: 1.0,
            p: zero_mass,
        });
    }
    let max_k = pmf.iter().map(|&(k, _)| k).max().unwrap_or(0);
    if max_k == 0 {
        return bins;
    }
    let mut lo = 1.0f64;
    loop {
        let hi = lo * base;
        let mass: f64 = pmf
            .iter()
            .filter(|&&(k, _)| k > 0 && (k as f64) >= lo && (k as f64) < hi)
            .map(|&(_, p)| p)
            .sum();
        if mass > 0.0 {
            bins.push(LogBin { lo, hi, p: mass });
        }
        if hi > max_k as f64 {
            break;
        }
        lo = hi;
    }
    bins
}

/// Corpus-level hate prevalence at a score threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrevalenceReport {
    pub tau: f64,
    pub total_posts: u64,
    pub hateful_posts: u64,
    /// Hateful fraction of all posts.
    pub hateful_post_share: f64,
    pub total_authors: u64,
    pub authors_with_hateful: u64,
    /// Fraction of posting users with at least one hateful post.
    pub hateful_author_share: f64,
    pub hateful_replies: u64,
    /// Reply fraction among hateful posts.
    pub hateful_reply_share: f64,
    /// Reply fraction over the whole corpus, for comparison.
    pub overall_reply_share: f64,
}

/// Prevalence of posts scoring strictly above `tau`, the share of authors
/// with at least one such post, and how strongly hate concentrates in
/// replies.
pub fn prevalence_stats(
    posts: &[PostRecord],
    score_of: impl Fn(&str) -> Option<f64>,
    tau: f64,
) -> PrevalenceReport {
    let mut report = PrevalenceReport {
        tau,
        ..PrevalenceReport::default()
    };
    let mut authors: HashSet<&str> = HashSet::new();
    let mut hateful_authors: HashSet<&str> = HashSet::new();
    let mut total_replies = 0u64;
    for post in posts {
        report.total_posts += 1;
        authors.insert(post.author.as_str());
        if post.kind == PostKind::Reply {
            total_replies += 1;
        }
        let hateful = score_of(&post.id).is_some_and(|s| s > tau);
        if hateful {
            report.hateful_posts += 1;
            hateful_authors.insert(post.author.as_str());
            if post.kind == PostKind::Reply {
                report.hateful_replies += 1;
            }
        }
    }
    report.total_authors = authors.len() as u64;
    report.authors_with_hateful = hateful_authors.len() as u64;
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    report.hateful_post_share = ratio(report.hateful_posts, report.total_posts);
    report.hateful_author_share = ratio(report.authors_with_hateful, report.total_authors);
    report.hateful_reply_share = ratio(report.hateful_replies, report.hateful_posts);
    report.overall_reply_share = ratio(total_replies, report.total_posts);
    report
}

/// Emotion labels produced by the external affect classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Emotion {
    Anger,
    Joy,
    Sadness,
    Fear,
    Love,
    Surprise,
}

pub const EMOTIONS: [Emotion; 6] = [
    Emotion::Anger,
    Emotion::Joy,
    Emotion::Sadness,
    Emotion::Fear,
    Emotion::Love,
    Emotion::Surprise,
];

impl Emotion {
    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
            Emotion::Fear => "fear",
            Emotion::Love => "love",
            Emotion::Surprise => "surprise",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "anger" => Some(Emotion::Anger),
            "joy" => Some(Emotion::Joy),
            "sadness" | "sad" => Some(Emotion::Sadness),
            "fear" => Some(Emotion::Fear),
            "love" => Some(Emotion::Love),
            "surprise" => Some(Emotion::Surprise),
            _ => None,
        }
    }

    fn index(self) -> usize {
        EMOTIONS.iter().position(|&e| e == self).unwrap()
    }
}

/// Externally predicted affect for one post; sentiment spans `[1, 5]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffectInput {
    pub post_id: String,
    pub sentiment: f64,
    pub emotion: Emotion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentOutOfRange {
    pub post_id: String,
    pub sentiment: f64,
}

impl core::fmt::Display for SentimentOutOfRange {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "sentiment {} for post {} is outside [1, 5]",
            self.sentiment, self.post_id
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SentimentOutOfRange {}

impl AffectInput {
    pub fn new(post_id: String, sentiment: f64, emotion: Emotion) -> Result<Self, SentimentOutOfRange> {
        if !(1.0..=5.0).contains(&sentiment) {
            return Err(SentimentOutOfRange { post_id, sentiment });
        }
        Ok(Self {
            post_id,
            sentiment,
            emotion,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffectSummary {
    pub n_posts: u64,
    /// Shares indexed like [`EMOTIONS`]; they sum to one.
    pub emotion_shares: [f64; 6],
    pub median_sentiment: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AffectReport {
    pub by_group: BTreeMap<Group, AffectSummary>,
    /// Affect rows whose post id has no known author.
    pub unknown_posts: u64,
}

/// Emotion distribution and median sentiment per group, joining each affect
/// row to its author's group through the post table.
pub fn affect_aggregation<'a>(
    affect: &[AffectInput],
    author_of: impl Fn(&str) -> Option<&'a str>,
    group_of: &HashMap<&str, Group>,
) -> AffectReport {
    #[derive(Default)]
    struct Acc {
        emotion_counts: [u64; 6],
        sentiments: Vec<f64>,
    }
    let mut groups: BTreeMap<Group, Acc> = BTreeMap::new();
    let mut unknown = 0u64;
    for row in affect {
        let group = author_of(&row.post_id).and_then(|a| group_of.get(a).copied());
        let Some(group) = group else {
            unknown += 1;
            continue;
        };
        let acc = groups.entry(group).or_default();
        acc.emotion_counts[row.emotion.index()] += 1;
        acc.sentiments.push(row.sentiment);
    }
    let by_group = groups
        .into_iter()
        .map(|(group, mut acc)| {
            let n = acc.sentiments.len() as u64;
            acc.sentiments.sort_unstable_by(f64::total_cmp);
            let mut shares = [0.0f64; 6];
            for (share, &count) in shares.iter_mut().zip(&acc.emotion_counts) {
                *share = count as f64 / n as f64;
            }
            let summary = AffectSummary {
                n_posts: n,
                emotion_shares: shares,
                median_sentiment: acc.sentiments[(acc.sentiments.len() - 1) / 2],
            };
            (group, summary)
        })
        .collect();
    AffectReport {
        by_group,
        unknown_posts: unknown,
    }
}
