//! Active-user filtering and HM / ~HM / N / Inactive group assignment.
//!
//! Users with too little history (fewer than five authored items or an
//! account younger than 60 days, by default) are set aside as `Inactive`.
//! The remaining users are segmented by diffused belief. Two threshold
//! interpretations are provided:
//!
//! * `ScoreRange` (default) — fixed cut points on the `[0, 1]` belief scale:
//!   `HM` at or above the high threshold, `N` strictly below the low one,
//!   the rest `~HM`.
//! * `PopulationQuantile` — the cut points are the 75th / 25th percentiles
//!   of the active users' beliefs, which forces quarter-sized tail groups.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::records::{PostKind, PostRecord, UserId, UserRecord};

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Per-user activity counts and account age in days at the reference time.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityProfile {
    pub user_id: UserId,
    pub n_originals: u64,
    pub n_replies: u64,
    pub n_reposts: u64,
    pub age_days: f64,
}

impl ActivityProfile {
    pub fn total_items(&self) -> u64 {
        self.n_originals + self.n_replies + self.n_reposts
    }
}

/// Accumulates activity profiles from streamed posts and user records.
///
/// Age is measured from registration when the user record carries one, and
/// from the user's first observed activity otherwise (some platform dumps
/// lack registration times entirely).
#[derive(Debug, Default)]
pub struct ProfileBuilder {
    counts: HashMap<UserId, [u64; 3]>,
    first_seen: HashMap<UserId, i64>,
    registered: HashMap<UserId, i64>,
    max_created: Option<i64>,
}

impl ProfileBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe_post(&mut self, post: &PostRecord) {
        let slot = match post.kind {
            PostKind::Original => 0,
            PostKind::Reply => 1,
            PostKind::Repost => 2,
        };
        self.counts.entry(post.author.clone()).or_default()[slot] += 1;
        self.first_seen
            .entry(post.author.clone())
            .and_modify(|t| *t = (*t).min(post.created_at))
            .or_insert(post.created_at);
        self.max_created = Some(match self.max_created {
            None => post.created_at,
            Some(t) => t.max(post.created_at),
        });
    }

    pub fn observe_user(&mut self, user: &UserRecord) {
        self.counts.entry(user.id.clone()).or_default();
        if let Some(at) = user.registered_at {
            self.registered.insert(user.id.clone(), at);
        }
    }

    /// Build profiles sorted by user id. `reference` defaults to the newest
    /// observed `created_at`; ages clamp at zero.
    pub fn finish(self, reference: Option<i64>) -> (Vec<ActivityProfile>, i64) {
        let reference = reference.or(self.max_created).unwrap_or(0);
        let mut profiles: Vec<ActivityProfile> = self
            .counts
            .iter()
            .map(|(id, counts)| {
                let born = self
                    .registered
                    .get(id)
                    .or_else(|| self.first_seen.get(id))
                    .copied()
                    .unwrap_or(reference);
                let age_days = ((reference - born) as f64 / SECONDS_PER_DAY).max(0.0);
                ActivityProfile {
                    user_id: id.clone(),
                    n_originals: counts[0],
                    n_replies: counts[1],
                    n_reposts: counts[2],
                    age_days,
                }
            })
            .collect();
        profiles.sort_unstable_by(|a, b| a.user_id.cmp(&b.user_id));
        (profiles, reference)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivityFilter {
    pub min_items: u64,
    pub min_age_days: f64,
}

impl Default for ActivityFilter {
    fn default() -> Self {
        Self {
            min_items: 5,
            min_age_days: 60.0,
        }
    }
}

impl ActivityFilter {
    pub fn is_active(&self, profile: &ActivityProfile) -> bool {
        profile.total_items() >= self.min_items && profile.age_days >= self.min_age_days
    }
}

/// Indices of active and inactive profiles under the filter.
pub fn partition_active(
    profiles: &[ActivityProfile],
    filter: &ActivityFilter,
) -> (Vec<usize>, Vec<usize>) {
    let mut active = Vec::new();
    let mut inactive = Vec::new();
    for (i, p) in profiles.iter().enumerate() {
        if filter.is_active(p) {
            active.push(i);
        } else {
            inactive.push(i);
        }
    }
    (active, inactive)
}

/// User segment. Wire names: `HM`, `HM_TILDE`, `N`, `INACTIVE`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Group {
    #[cfg_attr(feature = "serde", serde(rename = "HM"))]
    HateMonger,
    #[cfg_attr(feature = "serde", serde(rename = "HM_TILDE"))]
    Borderline,
    #[cfg_attr(feature = "serde", serde(rename = "N"))]
    Normal,
    #[cfg_attr(feature = "serde", serde(rename = "INACTIVE"))]
    Inactive,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::HateMonger => "HM",
            Group::Borderline => "HM_TILDE",
            Group::Normal => "N",
            Group::Inactive => "INACTIVE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "HM" => Some(Group::HateMonger),
            "HM_TILDE" => Some(Group::Borderline),
            "N" => Some(Group::Normal),
            "INACTIVE" => Some(Group::Inactive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupAssignment {
    pub user_id: UserId,
    pub group: Group,
    pub belief: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentationMode {
    ScoreRange,
    PopulationQuantile,
}

impl SegmentationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentationMode::ScoreRange => "score_range",
            SegmentationMode::PopulationQuantile => "population_quantile",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "score_range" => Some(SegmentationMode::ScoreRange),
            "population_quantile" => Some(SegmentationMode::PopulationQuantile),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentationError {
    BadThresholds { low: f64, high: f64 },
}

impl core::fmt::Display for SegmentationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SegmentationError::BadThresholds { low, high } => {
                write!(f, "thresholds must satisfy 0 <= low < high <= 1, got {low}/{high}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SegmentationError {}

/// Segmentation outcome; `degenerate_quantiles` flags the all-equal-beliefs
/// case where the quantile mode cannot separate groups and every active user
/// lands in `~HM`.
#[derive(Debug, Clone)]
pub struct Segmentation {
    pub assignments: Vec<GroupAssignment>,
    pub thresholds_used: (f64, f64),
    pub degenerate_quantiles: bool,
}

/// One user's input to segmentation: belief plus the activity-filter verdict.
#[derive(Debug, Clone)]
pub struct SegmentationEntry {
    pub user_id: UserId,
    pub belief: f64,
    pub active: bool,
}

/// Lower nearest-rank percentile: `sorted[floor(q * (n - 1))]`.
fn percentile_lower(sorted: &[f64], q: f64) -> f64 {
    let idx = (q * (sorted.len() - 1) as f64) as usize;
    sorted[idx.min(sorted.len() - 1)]
}

pub fn assign_groups(
    entries: &[SegmentationEntry],
    theta_low: f64,
    theta_high: f64,
    mode: SegmentationMode,
) -> Result<Segmentation, SegmentationError> {
    if !(0.0..1.0).contains(&theta_low) || theta_high > 1.0 || theta_low >= theta_high {
        return Err(SegmentationError::BadThresholds {
            low: theta_low,
            high: theta_high,
        });
    }

    let mut degenerate = false;
    let (low, high) = match mode {
        SegmentationMode::ScoreRange => (theta_low, theta_high),
        SegmentationMode::PopulationQuantile => {
            let mut active: Vec<f64> = entries
                .iter()
                .filter(|e| e.active)
                .map(|e| e.belief)
                .collect();
            if active.is_empty() {
                (theta_low, theta_high)
            } else {
                active.sort_unstable_by(f64::total_cmp);
                let low = percentile_lower(&active, theta_low);
                let high = percentile_lower(&active, theta_high);
                if low >= high {
                    degenerate = true;
                }
                (low, high)
            }
        }
    };

    let assignments = entries
        .iter()
        .map(|e| {
            let group = if !e.active {
                Group::Inactive
            } else if degenerate {
                Group::Borderline
            } else if e.belief >= high {
                Group::HateMonger
            } else if e.belief < low {
                Group::Normal
            } else {
                Group::Borderline
            };
            GroupAssignment {
                user_id: e.user_id.clone(),
                group,
                belief: e.belief,
            }
        })
        .collect();

    Ok(Segmentation {
        assignments,
        thresholds_used: (low, high),
        degenerate_quantiles: degenerate,
    })
}

/// Group membership lookup keyed by user id.
pub fn group_index(assignments: &[GroupAssignment]) -> HashMap<&str, Group> {
    assignments
        .iter()
        .map(|a| (a.user_id.as_str(), a.group))
        .collect()
}

/// Convert a user-id keyed activity table into a plain string map key. Used
/// by analytics joins.
pub fn profile_index(profiles: &[ActivityProfile]) -> HashMap<&str, &ActivityProfile> {
    profiles.iter().map(|p| (p.user_id.as_str(), p)).collect()
}
