//! Domain records: posts, users, and corpus-level tallies.

use alloc::borrow::Borrow;
use alloc::string::String;
use core::fmt;

use hashbrown::HashSet;

/// Opaque user identifier. Non-empty by convention; emptiness is rejected at
/// the ingestion boundary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for UserId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl Borrow<str> for UserId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Authored-content kind. Reposts are share actions (Parler "echoes",
/// Twitter retweets); replies are comments on an existing post.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PostKind {
    Original,
    Reply,
    Repost,
}

impl PostKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PostKind::Original => "original",
            PostKind::Reply => "reply",
            PostKind::Repost => "repost",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "original" => Some(PostKind::Original),
            "reply" => Some(PostKind::Reply),
            "repost" => Some(PostKind::Repost),
            _ => None,
        }
    }
}

/// A single platform post. `created_at` is UTC epoch seconds.
///
/// For replies and reposts at least one of `parent_id` / `root_author` is
/// present (enforced at ingestion): `parent_id` points at the post being
/// answered or shared, `root_author` names the original author of the shared
/// content when the source dump provides it directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostRecord {
    pub id: String,
    pub author: UserId,
    pub kind: PostKind,
    pub parent_id: Option<String>,
    pub root_author: Option<UserId>,
    pub created_at: i64,
    pub body: Option<String>,
}

/// Account metadata. Every field except `id` is optional because the public
/// dumps differ in richness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub id: UserId,
    pub registered_at: Option<i64>,
    pub follower_count: Option<u64>,
    pub followee_count: Option<u64>,
    pub bio: Option<String>,
}

/// Corpus tallies: post counts by kind, distinct users, and the observed
/// time span. `n_posts` counts originals only, mirroring how platform dumps
/// report posts / replies / reposts as separate rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorpusStats {
    pub n_users: u64,
    pub n_posts: u64,
    pub n_replies: u64,
    pub n_reposts: u64,
    /// `(min, max)` of `created_at`; absent for an empty corpus.
    pub time_span: Option<(i64, i64)>,
}

impl CorpusStats {
    pub fn compute(posts: &[PostRecord], users: &[UserRecord]) -> Self {
        let mut acc = StatsAccumulator::default();
        for p in posts {
            acc.observe_post(p);
        }
        for u in users {
            acc.observe_user(u);
        }
        acc.finish()
    }

    pub fn total_items(&self) -> u64 {
        self.n_posts + self.n_replies + self.n_reposts
    }
}

/// Streaming builder for [`CorpusStats`]. Users are counted once whether they
/// appear as a user record, a post author, or both. Merging two accumulators
/// fed from disjoint shards of the same corpus is order-independent.
#[derive(Debug, Default)]
pub struct StatsAccumulator {
    stats: CorpusStats,
    seen_users: HashSet<UserId>,
}

impl StatsAccumulator {
    pub fn observe_post(&mut self, post: &PostRecord) {
        match post.kind {
            PostKind::Original => self.stats.n_posts += 1,
            PostKind::Reply => self.stats.n_replies += 1,
            PostKind::Repost => self.stats.n_reposts += 1,
        }
        self.stats.time_span = Some(match self.stats.time_span {
            None => (post.created_at, post.created_at),
            Some((lo, hi)) => (lo.min(post.created_at), hi.max(post.created_at)),
        });
        self.observe_user_id(&post.author);
    }

    pub fn observe_user(&mut self, user: &UserRecord) {
        self.observe_user_id(&user.id);
    }

    fn observe_user_id(&mut self, id: &UserId) {
        if !self.seen_users.contains(id.as_str()) {
            self.seen_users.insert(id.clone());
        }
    }

    pub fn finish(self) -> CorpusStats {
        let mut stats = self.stats;
        stats.n_users = self.seen_users.len() as u64;
        stats
    }
}
