//! Property tests for the pure per-record rules.

use echograph_core::analytics::{trimmed, MetricSummary};
use echograph_core::annotations::{aggregate_annotations, label_triple, AnnotationTriple};
use echograph_core::scoring::Lexicon;
use proptest::prelude::*;

proptest! {
    #[test]
    fn aggregation_partitions_and_ignores_slot_order(
        triples in proptest::collection::vec((1u8..=5, 1u8..=5, 1u8..=5), 0..200)
    ) {
        let records: Vec<AnnotationTriple> = triples
            .iter()
            .enumerate()
            .map(|(i, &(a, b, c))| AnnotationTriple::new(format!("p{i}"), [a, b, c]).unwrap())
            .collect();
        let (labels, summary) = aggregate_annotations(&records);
        prop_assert_eq!(summary.total() as usize, records.len());
        prop_assert_eq!(labels.len(), records.len());
        for &(a, b, c) in &triples {
            let want = label_triple([a, b, c]);
            prop_assert_eq!(label_triple([c, a, b]), want);
            prop_assert_eq!(label_triple([b, c, a]), want);
        }
    }

    #[test]
    fn mean_score_is_consistent_with_label(scores in (1u8..=5, 1u8..=5, 1u8..=5)) {
        let (a, b, c) = scores;
        let triple = AnnotationTriple::new("p".into(), [a, b, c]).unwrap();
        let (labels, _) = aggregate_annotations(std::slice::from_ref(&triple));
        let mean = labels[0].mean_score;
        use echograph_core::annotations::AnnotationLabel::*;
        match labels[0].label {
            Hateful => prop_assert!(mean > 3.0),
            NonHateful => prop_assert!(mean < 3.0),
            OmittedMean3 => prop_assert!((mean - 3.0).abs() < 1e-12),
            FilteredLowAgreement => {}
        }
    }

    #[test]
    fn trimming_drops_at_most_five_percent(values in proptest::collection::vec(-1e6f64..1e6, 1..500)) {
        let mut sorted = values.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        let kept = trimmed(&sorted).len();
        let target = (0.95 * sorted.len() as f64).ceil() as i64;
        prop_assert!((kept as i64 - target).abs() <= 1);
        let summary = MetricSummary::from_values(values).unwrap();
        prop_assert!(summary.median >= sorted[0] && summary.median <= sorted[sorted.len() - 1]);
        prop_assert!(summary.trim_lo <= summary.trim_hi);
    }

    #[test]
    fn lexicon_matching_is_case_insensitive(words in proptest::collection::vec("[a-z]{1,8}", 1..12)) {
        let text = words.join(" ");
        let lex = Lexicon::new(vec!["kike".into(), "white power".into()], true).unwrap();
        prop_assert_eq!(lex.is_match(&text), lex.is_match(&text.to_uppercase()));
    }

    #[test]
    fn growing_the_lexicon_never_removes_matches(words in proptest::collection::vec("[a-z]{1,8}", 1..12)) {
        let text = words.join(" ");
        let small = Lexicon::new(vec!["kike".into()], true).unwrap();
        let large = Lexicon::new(vec!["kike".into(), words[0].clone() + "zz"], true).unwrap();
        if small.is_match(&text) {
            prop_assert!(large.is_match(&text));
        }
    }
}
