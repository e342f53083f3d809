//! Annotation aggregation, inter-annotator agreement, and stratified
//! sampling of posts for annotation.
//!
//! Each post carries exactly three 1–5 ratings. A triple is discarded for
//! low agreement when it contains three distinct values or when the spread
//! between the highest and lowest rating exceeds two. Otherwise the post is
//! hateful when the rating sum exceeds 9 (mean above three), non-hateful
//! below 9, and omitted at exactly 9 — the comparison is done on integer
//! sums so the mean-of-exactly-three rule never hits float equality.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::records::{PostKind, PostRecord};
use crate::rng::CounterRng;

/// Three Lickert ratings (1–5) for one post.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationTriple {
    pub post_id: String,
    pub scores: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnnotationError {
    ScoreOutOfRange { post_id: String, score: u8 },
    EmptyInput,
}

impl fmt::Display for AnnotationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnotationError::ScoreOutOfRange { post_id, score } => {
                write!(f, "annotation score {score} for post {post_id} is outside 1..=5")
            }
            AnnotationError::EmptyInput => write!(f, "no annotation triples supplied"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AnnotationError {}

impl AnnotationTriple {
    pub fn new(post_id: String, scores: [u8; 3]) -> Result<Self, AnnotationError> {
        if let Some(&score) = scores.iter().find(|s| !(1..=5).contains(*s)) {
            return Err(AnnotationError::ScoreOutOfRange { post_id, score });
        }
        Ok(Self { post_id, scores })
    }
}

/// Wire names: `hateful`, `non_hateful`, `omitted_mean3`,
/// `filtered_low_agreement`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationLabel {
    Hateful,
    NonHateful,
    OmittedMean3,
    FilteredLowAgreement,
}

impl AnnotationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationLabel::Hateful => "hateful",
            AnnotationLabel::NonHateful => "non_hateful",
            AnnotationLabel::OmittedMean3 => "omitted_mean3",
            AnnotationLabel::FilteredLowAgreement => "filtered_low_agreement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hateful" => Some(AnnotationLabel::Hateful),
            "non_hateful" => Some(AnnotationLabel::NonHateful),
            "omitted_mean3" => Some(AnnotationLabel::OmittedMean3),
            "filtered_low_agreement" => Some(AnnotationLabel::FilteredLowAgreement),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedLabel {
    pub post_id: String,
    pub label: AnnotationLabel,
    pub mean_score: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AggregateSummary {
    pub hateful: u64,
    pub non_hateful: u64,
    pub omitted_mean3: u64,
    pub filtered_low_agreement: u64,
}

impl AggregateSummary {
    pub fn total(&self) -> u64 {
        self.hateful + self.non_hateful + self.omitted_mean3 + self.filtered_low_agreement
    }
}

pub fn label_triple(scores: [u8; 3]) -> AnnotationLabel {
    let min = scores.iter().min().copied().unwrap_or(0);
    let max = scores.iter().max().copied().unwrap_or(0);
    let distinct = {
        let mut v = scores;
        v.sort_unstable();
        1 + v.windows(2).filter(|w| w[0] != w[1]).count()
    };
    if distinct >= 3 || max - min > 2 {
        return AnnotationLabel::FilteredLowAgreement;
    }
    let sum: u16 = scores.iter().map(|&s| s as u16).sum();
    match sum.cmp(&9) {
        core::cmp::Ordering::Greater => AnnotationLabel::Hateful,
        core::cmp::Ordering::Less => AnnotationLabel::NonHateful,
        core::cmp::Ordering::Equal => AnnotationLabel::OmittedMean3,
    }
}

pub fn aggregate_annotations(
    triples: &[AnnotationTriple],
) -> (Vec<AggregatedLabel>, AggregateSummary) {
    let mut summary = AggregateSummary::default();
    let labels = triples
        .iter()
        .map(|t| {
            let label = label_triple(t.scores);
            match label {
                AnnotationLabel::Hateful => summary.hateful += 1,
                AnnotationLabel::NonHateful => summary.non_hateful += 1,
                AnnotationLabel::OmittedMean3 => summary.omitted_mean3 += 1,
                AnnotationLabel::FilteredLowAgreement => summary.filtered_low_agreement += 1,
            }
            AggregatedLabel {
                post_id: t.post_id.clone(),
                label,
                mean_score: t.scores.iter().map(|&s| s as f64).sum::<f64>() / 3.0,
            }
        })
        .collect();
    (labels, summary)
}

/// Cohen's kappa over two aligned 1–5 rating slices. Perfect agreement is
/// defined as kappa one even when both raters are constant (where the
/// chance-agreement denominator degenerates).
pub fn cohen_kappa(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mut joint = [[0u64; 5]; 5];
    for (&x, &y) in a.iter().zip(b) {
        joint[(x - 1) as usize][(y - 1) as usize] += 1;
    }
    let observed: u64 = (0..5).map(|c| joint[c][c]).sum();
    let po = observed as f64 / n;
    if po == 1.0 {
        return 1.0;
    }
    let mut pe = 0.0;
    for c in 0..5 {
        let row: u64 = joint[c].iter().sum();
        let col: u64 = (0..5).map(|r| joint[r][c]).sum();
        pe += (row as f64 / n) * (col as f64 / n);
    }
    (po - pe) / (1.0 - pe)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgreementReport {
    /// Mean over posts of the fraction of the three annotator pairs that
    /// agree exactly.
    pub agreement_rate: f64,
    /// Mean of the three slot-pair Cohen's kappas.
    pub kappa: f64,
    pub per_pair_kappa: [f64; 3],
}

/// Agreement statistics across the three annotation slots. With rotating
/// annotator pools a literal two-rater kappa does not exist; this treats
/// each slot position as a pseudo-rater and averages the three pairwise
/// kappas, which is computable from released per-post triples alone.
pub fn pairwise_kappa(triples: &[AnnotationTriple]) -> Result<AgreementReport, AnnotationError> {
    if triples.is_empty() {
        return Err(AnnotationError::EmptyInput);
    }
    let n = triples.len();
    let mut slots = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut agree_sum = 0.0;
    for t in triples {
        for (slot, &score) in slots.iter_mut().zip(&t.scores) {
            slot.push(score);
        }
        let [a, b, c] = t.scores;
        let matches = (a == b) as u32 + (a == c) as u32 + (b == c) as u32;
        agree_sum += matches as f64 / 3.0;
    }
    let per_pair_kappa = [
        cohen_kappa(&slots[0], &slots[1]),
        cohen_kappa(&slots[0], &slots[2]),
        cohen_kappa(&slots[1], &slots[2]),
    ];
    Ok(AgreementReport {
        agreement_rate: agree_sum / n as f64,
        kappa: per_pair_kappa.iter().sum::<f64>() / 3.0,
        per_pair_kappa,
    })
}

/// Annotation eligibility: original posts with a body of at least
/// `min_chars` characters and no URL.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EligibilityRule {
    pub min_chars: usize,
}

impl Default for EligibilityRule {
    fn default() -> Self {
        Self { min_chars: 10 }
    }
}

/// Case-insensitive substring check for `http://`, `https://`, `www.`.
pub fn contains_url(text: &str) -> bool {
    let lower = text.to_lowercase();
    ["http://", "https://", "www."]
        .iter()
        .any(|m| lower.contains(m))
}

impl EligibilityRule {
    pub fn is_eligible(&self, post: &PostRecord) -> bool {
        if post.kind != PostKind::Original {
            return false;
        }
        match &post.body {
            None => false,
            Some(body) => body.chars().count() >= self.min_chars && !contains_url(body),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleError {
    EdgesNotAscending,
    CountMismatch { strata: usize, counts: usize },
}

impl fmt::Display for SampleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleError::EdgesNotAscending => write!(f, "strata edges must be strictly ascending"),
            SampleError::CountMismatch { strata, counts } => write!(
                f,
                "{counts} per-stratum counts supplied for {strata} strata"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SampleError {}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPost {
    pub post_id: String,
    pub stratum: usize,
    pub score: f64,
}

#[derive(Debug, Clone)]
pub struct SampleReport {
    pub sampled: Vec<SampledPost>,
    /// Eligible posts available per stratum before sampling.
    pub eligible_per_stratum: Vec<u64>,
    /// Eligible posts with no score or a score outside every stratum.
    pub out_of_strata: u64,
}

/// Stratified sample of eligible posts by predicted score.
///
/// Strata are the half-open intervals `[edges[i], edges[i+1])`. Within each
/// stratum the eligible posts are ordered by post id and `per_stratum[i]` of
/// them are drawn uniformly without replacement via a partial Fisher–Yates
/// shuffle; each stratum uses its own derived stream of `seed`, so the
/// result depends only on `(eligible set, edges, counts, seed)`.
pub fn stratified_sample(
    posts: &[PostRecord],
    score_of: impl Fn(&str) -> Option<f64>,
    edges: &[f64],
    per_stratum: &[u64],
    seed: u64,
    rule: &EligibilityRule,
) -> Result<SampleReport, SampleError> {
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SampleError::EdgesNotAscending);
    }
    let n_strata = edges.len() - 1;
    if per_stratum.len() != n_strata {
        return Err(SampleError::CountMismatch {
            strata: n_strata,
            counts: per_stratum.len(),
        });
    }

    let mut by_stratum: Vec<Vec<(&str, f64)>> = core::iter::repeat_with(Vec::new)
        .take(n_strata)
        .collect();
    let mut out_of_strata = 0u64;
    for post in posts {
        if !rule.is_eligible(post) {
            continue;
        }
        let Some(score) = score_of(&post.id) else {
            out_of_strata += 1;
            continue;
        };
        let idx = edges.partition_point(|&e| e <= score);
        if idx == 0 || idx > n_strata {
            out_of_strata += 1;
            continue;
        }
        by_stratum[idx - 1].push((post.id.as_str(), score));
    }

    let rng = CounterRng::new(seed);
    let mut sampled = Vec::new();
    let mut eligible_per_stratum = Vec::with_capacity(n_strata);
    for (stratum, pool) in by_stratum.iter_mut().enumerate() {
        pool.sort_unstable_by(|a, b| a.0.cmp(b.0));
        eligible_per_stratum.push(pool.len() as u64);
        let take = (per_stratum[stratum] as usize).min(pool.len());
        let mut stream = rng.derive(stratum as u64);
        for i in 0..take {
            let j = i + stream.below((pool.len() - i) as u64) as usize;
            pool.swap(i, j);
            sampled.push(SampledPost {
                post_id: String::from(pool[i].0),
                stratum,
                score: pool[i].1,
            });
        }
    }

    Ok(SampleReport {
        sampled,
        eligible_per_stratum,
        out_of_strata,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::UserId;
    use alloc::string::ToString;
    use alloc::vec;

    fn triple(scores: [u8; 3]) -> AnnotationTriple {
        AnnotationTriple::new("p".to_string(), scores).unwrap()
    }

    #[test]
    fn labeling_rules() {
        let cases: [([u8; 3], AnnotationLabel); 10] = [
            ([5, 5, 4], AnnotationLabel::Hateful),
            ([3, 3, 3], AnnotationLabel::OmittedMean3),
            ([2, 2, 5], AnnotationLabel::FilteredLowAgreement), // spread 3
            ([1, 2, 4], AnnotationLabel::FilteredLowAgreement), // three distinct
            ([1, 1, 2], AnnotationLabel::NonHateful),
            ([2, 2, 4], AnnotationLabel::NonHateful), // spread exactly 2 passes
            ([3, 3, 4], AnnotationLabel::Hateful),
            ([3, 4, 2], AnnotationLabel::FilteredLowAgreement),
            ([1, 1, 1], AnnotationLabel::NonHateful),
            ([5, 5, 5], AnnotationLabel::Hateful),
        ];
        for (scores, want) in cases {
            assert_eq!(label_triple(scores), want, "scores {scores:?}");
        }
    }

    #[test]
    fn labeling_is_permutation_invariant() {
        let perms = |s: [u8; 3]| {
            [
                [s[0], s[1], s[2]],
                [s[0], s[2], s[1]],
                [s[1], s[0], s[2]],
                [s[1], s[2], s[0]],
                [s[2], s[0], s[1]],
                [s[2], s[1], s[0]],
            ]
        };
        for scores in [[5, 5, 4], [3, 3, 3], [2, 2, 5], [1, 2, 4], [1, 1, 2]] {
            let want = label_triple(scores);
            for p in perms(scores) {
                assert_eq!(label_triple(p), want);
            }
        }
    }

    #[test]
    fn aggregate_counts_partition_input() {
        let triples = vec![
            triple([5, 5, 4]),
            triple([3, 3, 3]),
            triple([2, 2, 5]),
            triple([1, 1, 2]),
        ];
        let (labels, summary) = aggregate_annotations(&triples);
        assert_eq!(labels.len(), 4);
        assert_eq!(summary.total(), 4);
        assert_eq!(summary.hateful, 1);
        assert_eq!(summary.non_hateful, 1);
        assert_eq!(summary.omitted_mean3, 1);
        assert_eq!(summary.filtered_low_agreement, 1);
        assert!((labels[0].mean_score - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn score_range_validated() {
        assert!(AnnotationTriple::new("p".into(), [0, 3, 3]).is_err());
        assert!(AnnotationTriple::new("p".into(), [1, 6, 3]).is_err());
    }

    #[test]
    fn perfect_agreement_gives_kappa_one() {
        let triples = vec![triple([2, 2, 2]), triple([5, 5, 5]), triple([3, 3, 3])];
        let report = pairwise_kappa(&triples).unwrap();
        assert_eq!(report.agreement_rate, 1.0);
        assert_eq!(report.kappa, 1.0);
    }

    /// Closed-form check on a 2x2 contingency table: a=20, b=5, c=10, d=15
    /// gives po = 0.7, pe = 0.5, kappa = 0.4.
    #[test]
    fn kappa_matches_hand_computed_contingency() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for _ in 0..20 {
            a.push(1);
            b.push(1);
        }
        for _ in 0..5 {
            a.push(1);
            b.push(2);
        }
        for _ in 0..10 {
            a.push(2);
            b.push(1);
        }
        for _ in 0..15 {
            a.push(2);
            b.push(2);
        }
        assert!((cohen_kappa(&a, &b) - 0.4).abs() <= 1e-12);
    }

    #[test]
    fn kappa_never_exceeds_one() {
        let triples = vec![triple([1, 2, 1]), triple([4, 4, 5]), triple([3, 3, 3])];
        let report = pairwise_kappa(&triples).unwrap();
        assert!(report.kappa <= 1.0);
        assert!(pairwise_kappa(&[]).is_err());
    }

    fn post(id: &str, kind: PostKind, body: Option<&str>) -> PostRecord {
        PostRecord {
            id: id.to_string(),
            author: UserId::from("a"),
            kind,
            parent_id: (kind != PostKind::Original).then(|| "parent".to_string()),
            root_author: None,
            created_at: 0,
            body: body.map(str::to_string),
        }
    }

    #[test]
    fn eligibility_rules() {
        let rule = EligibilityRule::default();
        assert!(rule.is_eligible(&post("a", PostKind::Original, Some("0123456789"))));
        // Nine characters: too short.
        assert!(!rule.is_eligible(&post("b", PostKind::Original, Some("012345678"))));
        assert!(!rule.is_eligible(&post("c", PostKind::Reply, Some("long enough text"))));
        assert!(!rule.is_eligible(&post("d", PostKind::Repost, Some("long enough text"))));
        assert!(!rule.is_eligible(&post("e", PostKind::Original, None)));
        assert!(!rule.is_eligible(&post(
            "f",
            PostKind::Original,
            Some("see WWW.example.com for more")
        )));
        assert!(!rule.is_eligible(&post(
            "g",
            PostKind::Original,
            Some("see https://example.com now")
        )));
    }

    fn scored_posts(n: usize) -> (Vec<PostRecord>, Vec<f64>) {
        let posts: Vec<PostRecord> = (0..n)
            .map(|i| post(&alloc::format!("p{i:03}"), PostKind::Original, Some("long enough body")))
            .collect();
        let scores: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        (posts, scores)
    }

    #[test]
    fn sampling_is_deterministic_and_respects_strata() {
        let (posts, scores) = scored_posts(40);
        let score_of = |id: &str| {
            let idx: usize = id[1..].parse().unwrap();
            Some(scores[idx])
        };
        let edges = [0.0, 0.5, 1.0];
        let report =
            stratified_sample(&posts, score_of, &edges, &[5, 5], 7, &EligibilityRule::default())
                .unwrap();
        let again =
            stratified_sample(&posts, score_of, &edges, &[5, 5], 7, &EligibilityRule::default())
                .unwrap();
        assert_eq!(report.sampled, again.sampled);
        assert_eq!(report.sampled.len(), 10);
        for s in &report.sampled {
            let (lo, hi) = (edges[s.stratum], edges[s.stratum + 1]);
            assert!(s.score >= lo && s.score < hi);
        }
        let other =
            stratified_sample(&posts, score_of, &edges, &[5, 5], 8, &EligibilityRule::default())
                .unwrap();
        assert_ne!(report.sampled, other.sampled);
    }

    #[test]
    fn requesting_more_than_available_returns_all_eligible() {
        let (posts, scores) = scored_posts(6);
        let score_of = |id: &str| {
            let idx: usize = id[1..].parse().unwrap();
            Some(scores[idx])
        };
        let report = stratified_sample(
            &posts,
            score_of,
            &[0.0, 1.0],
            &[100],
            1,
            &EligibilityRule::default(),
        )
        .unwrap();
        assert_eq!(report.sampled.len(), 6);
        assert_eq!(report.eligible_per_stratum, vec![6]);
    }

    #[test]
    fn bad_strata_rejected() {
        let err = stratified_sample(
            &[],
            |_| None,
            &[0.5, 0.5],
            &[1],
            1,
            &EligibilityRule::default(),
        );
        assert_eq!(err.unwrap_err(), SampleError::EdgesNotAscending);
        let err = stratified_sample(
            &[],
            |_| None,
            &[0.0, 1.0],
            &[1, 2],
            1,
            &EligibilityRule::default(),
        );
        assert!(matches!(err.unwrap_err(), SampleError::CountMismatch { .. }));
    }
}
