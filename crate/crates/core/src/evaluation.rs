//! Post-level precision–recall curves and user-level classification
//! evaluation.
//!
//! Curve construction: one candidate threshold per distinct score, a post is
//! predicted hateful when `score >= threshold`, and points are ordered by
//! threshold. The smallest attained score predicts every post positive and
//! carries no ranking information, so it is not emitted — which also means a
//! hard 0/1 scorer contributes exactly one operating point, at threshold
//! one. Inputs whose labels are all negative have no defined recall and
//! yield an empty curve with a warning flag.

use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::records::UserId;
use crate::segmentation::{Group, GroupAssignment};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrWarning {
    /// Every label is negative; recall is undefined at every threshold.
    NoPositiveLabels,
    /// Only one distinct score: the single candidate threshold predicts
    /// everything positive and is skipped.
    ConstantScores,
}

/// Precision–recall points from `(score, is_hateful)` pairs.
pub fn pr_curve(pairs: &[(f64, bool)]) -> (Vec<PrPoint>, Option<PrWarning>) {
    let positives = pairs.iter().filter(|&&(_, label)| label).count();
    if positives == 0 {
        return (Vec::new(), Some(PrWarning::NoPositiveLabels));
    }

    let mut thresholds: Vec<f64> = pairs.iter().map(|&(score, _)| score).collect();
    thresholds.sort_unstable_by(f64::total_cmp);
    thresholds.dedup();
    if thresholds.len() == 1 {
        return (Vec::new(), Some(PrWarning::ConstantScores));
    }

    // Sort pairs descending by score; walking the sorted list once yields the
    // cumulative TP/FP counts at each threshold.
    let mut sorted: Vec<(f64, bool)> = pairs.to_vec();
    sorted.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = Vec::with_capacity(thresholds.len() - 1);
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut cursor = 0usize;
    // Skip thresholds[0] (the minimum): it predicts every post positive.
    for &threshold in thresholds[1..].iter().rev() {
        while cursor < sorted.len() && sorted[cursor].0 >= threshold {
            if sorted[cursor].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            cursor += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        });
    }
    points.reverse();
    (points, None)
}

/// Ground-truth user annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserLabel {
    pub user_id: UserId,
    pub is_hateful: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    NoLabeledUsers,
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::NoLabeledUsers => write!(f, "no labeled users overlap the assignments"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EvalError {}

/// Confusion counts and derived metrics for HM-as-positive-prediction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UserEvalReport {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub labeled_users: u64,
    /// Labeled users absent from the group assignments, excluded from the
    /// counts above.
    pub missing_users: u64,
}

/// Evaluate the segmentation against labeled users. Only the `HM` group
/// counts as a hateful prediction; `~HM`, `N`, and `Inactive` are negative.
pub fn user_level_eval(
    assignments: &[GroupAssignment],
    labels: &[UserLabel],
) -> Result<(UserEvalReport, Vec<UserId>), EvalError> {
    let group_of: HashMap<&str, Group> = assignments
        .iter()
        .map(|a| (a.user_id.as_str(), a.group))
        .collect();

    let mut seen: HashSet<&str> = HashSet::new();
    let mut missing = Vec::new();
    let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
    for label in labels {
        if !seen.insert(label.user_id.as_str()) {
            continue;
        }
        let Some(&group) = group_of.get(label.user_id.as_str()) else {
            missing.push(label.user_id.clone());
            continue;
        };
        let predicted = group == Group::HateMonger;
        match (predicted, label.is_hateful) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let labeled = tp + fp + fn_ + tn;
    if labeled == 0 {
        return Err(EvalError::NoLabeledUsers);
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok((
        UserEvalReport {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            true_negatives: tn,
            precision,
            recall,
            f1,
            labeled_users: labeled,
            missing_users: missing.len() as u64,
        },
        missing,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn perfect_scorer_yields_single_point() {
        let pairs = vec![(1.0, true), (0.0, false), (1.0, true), (0.0, false)];
        let (points, warning) = pr_curve(&pairs);
        assert_eq!(warning, None);
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].threshold, 1.0);
        assert_eq!(points[0].precision, 1.0);
        assert_eq!(points[0].recall, 1.0);
    }

    /// Hand-enumerated fixture: scores (0.9, 0.8, 0.4, 0.2), labels
    /// (1, 0, 1, 0). Thresholds 0.4 / 0.8 / 0.9 (0.2 predicts everything).
    #[test]
    fn four_post_fixture_matches_enumeration() {
        let pairs = vec![(0.9, true), (0.8, false), (0.4, true), (0.2, false)];
        let (points, warning) = pr_curve(&pairs);
        assert_eq!(warning, None);
        let expected = [
            (0.4, 2.0 / 3.0, 1.0),
            (0.8, 0.5, 0.5),
            (0.9, 1.0, 0.5),
        ];
        assert_eq!(points.len(), expected.len());
        for (point, (t, p, r)) in points.iter().zip(expected) {
            assert_eq!(point.threshold, t);
            assert_eq!(point.precision, p);
            assert_eq!(point.recall, r);
        }
    }

    #[test]
    fn all_negative_labels_yield_empty_curve() {
        let pairs = vec![(0.9, false), (0.1, false)];
        let (points, warning) = pr_curve(&pairs);
        assert!(points.is_empty());
        assert_eq!(warning, Some(PrWarning::NoPositiveLabels));
    }

    #[test]
    fn constant_scores_yield_empty_curve() {
        let pairs = vec![(0.5, true), (0.5, false)];
        let (points, warning) = pr_curve(&pairs);
        assert!(points.is_empty());
        assert_eq!(warning, Some(PrWarning::ConstantScores));
    }

    #[test]
    fn points_are_ordered_by_threshold() {
        let pairs: Vec<(f64, bool)> = (0..50)
            .map(|i| (i as f64 / 50.0, i % 3 == 0))
            .collect();
        let (points, _) = pr_curve(&pairs);
        assert!(points.windows(2).all(|w| w[0].threshold < w[1].threshold));
        for p in &points {
            assert!((0.0..=1.0).contains(&p.precision));
            assert!((0.0..=1.0).contains(&p.recall));
        }
    }

    fn assignment(id: &str, group: Group) -> GroupAssignment {
        GroupAssignment {
            user_id: UserId::from(id),
            group,
            belief: 0.0,
        }
    }

    fn label(id: &str, hateful: bool) -> UserLabel {
        UserLabel {
            user_id: UserId::from(id),
            is_hateful: hateful,
        }
    }

    #[test]
    fn identical_predictions_score_perfectly() {
        let assignments = vec![
            assignment("a", Group::HateMonger),
            assignment("b", Group::Normal),
        ];
        let labels = vec![label("a", true), label("b", false)];
        let (report, missing) = user_level_eval(&assignments, &labels).unwrap();
        assert!(missing.is_empty());
        assert_eq!((report.precision, report.recall, report.f1), (1.0, 1.0, 1.0));
    }

    /// Confusion fixture TP=9, FP=1, FN=8: precision 0.9, recall 9/17, and
    /// F1 = 2 * 0.9 * (9/17) / (0.9 + 9/17) = 2/3 exactly.
    #[test]
    fn confusion_fixture_matches_closed_form() {
        let mut assignments = Vec::new();
        let mut labels = Vec::new();
        for i in 0..9 {
            assignments.push(assignment(&format!("tp{i}"), Group::HateMonger));
            labels.push(label(&format!("tp{i}"), true));
        }
        assignments.push(assignment("fp0", Group::HateMonger));
        labels.push(label("fp0", false));
        for i in 0..8 {
            assignments.push(assignment(&format!("fn{i}"), Group::Normal));
            labels.push(label(&format!("fn{i}"), true));
        }
        let (report, _) = user_level_eval(&assignments, &labels).unwrap();
        assert!((report.precision - 0.9).abs() <= 1e-12);
        assert!((report.recall - 9.0 / 17.0).abs() <= 1e-12);
        assert!((report.f1 - 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn borderline_counts_as_negative_prediction() {
        let assignments = vec![assignment("a", Group::Borderline)];
        let labels = vec![label("a", true)];
        let (report, _) = user_level_eval(&assignments, &labels).unwrap();
        assert_eq!(report.false_negatives, 1);
        assert_eq!(report.f1, 0.0);
    }

    #[test]
    fn missing_labeled_users_are_reported() {
        let assignments = vec![assignment("a", Group::HateMonger)];
        let labels = vec![label("a", true), label("ghost", false)];
        let (report, missing) = user_level_eval(&assignments, &labels).unwrap();
        assert_eq!(report.missing_users, 1);
        assert_eq!(missing[0].as_str(), "ghost");
        assert_eq!(report.labeled_users, 1);
    }

    #[test]
    fn no_overlap_is_an_error() {
        let assignments = vec![assignment("a", Group::HateMonger)];
        let labels = vec![label("ghost", true)];
        assert!(user_level_eval(&assignments, &labels).is_err());
        assert!(user_level_eval(&assignments, &[]).is_err());
    }

    #[test]
    fn f1_zero_iff_no_true_positives() {
        let assignments = vec![
            assignment("a", Group::Normal),
            assignment("b", Group::HateMonger),
        ];
        let labels = vec![label("a", true), label("b", false)];
        let (report, _) = user_level_eval(&assignments, &labels).unwrap();
        assert_eq!(report.true_positives, 0);
        assert_eq!(report.f1, 0.0);
    }
}
