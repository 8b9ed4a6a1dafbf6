use ocrkit_core::metrics::{
    aggregate_report, bleu, edit_distance, levenshtein_norm, rouge_l, score_pair, MetricRecord,
    TokenizationPolicy,
};
use proptest::prelude::*;

fn tokens(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..6, 0..max)
}

fn short_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "ก", "น้ำ", " ", "x"]), 0..10)
        .prop_map(|parts| parts.concat())
}

fn record(id: usize, category: &str, bleu: f64) -> MetricRecord {
    MetricRecord {
        sample_id: format!("s{id:03}"),
        category: category.to_string(),
        bleu,
        rouge_l: 0.5,
        lev_norm: 0.5,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn scores_stay_in_unit_interval(a in tokens(16), b in tokens(16), n in 1usize..5) {
        let s = bleu(&a, &b, n);
        let r = rouge_l(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s), "bleu {s}");
        prop_assert!((0.0..=1.0).contains(&r), "rouge {r}");
    }

    #[test]
    fn normalized_levenshtein_in_range_and_symmetric(a in short_text(), b in short_text()) {
        let ab = levenshtein_norm(&a, &b);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, levenshtein_norm(&b, &a));
    }

    #[test]
    fn identical_texts_score_perfectly(t in short_text()) {
        prop_assume!(!t.trim().is_empty());
        let rec = score_pair("s", "c", &t, &t, TokenizationPolicy::default());
        prop_assert_eq!(rec.bleu, 1.0);
        prop_assert_eq!(rec.rouge_l, 1.0);
        prop_assert_eq!(rec.lev_norm, 0.0);
    }

    #[test]
    fn edit_distance_obeys_triangle_inequality(a in tokens(10), b in tokens(10), c in tokens(10)) {
        let ac = edit_distance(&a, &c);
        prop_assert!(ac <= edit_distance(&a, &b) + edit_distance(&b, &c));
        prop_assert_eq!(edit_distance(&a, &a), 0);
        prop_assert_eq!(edit_distance(&a, &c), edit_distance(&c, &a));
    }

    #[test]
    fn raising_one_bleu_raises_both_means(
        values in prop::collection::vec((0usize..3, 0.0f64..0.9), 1..20),
        pick in any::<prop::sample::Index>(),
        bump in 0.01f64..0.1,
    ) {
        let cats = ["thai_books", "financial", "forms"];
        let records: Vec<MetricRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &(c, v))| record(i, cats[c], v))
            .collect();
        let i = pick.index(records.len());
        let mut raised = records.clone();
        raised[i].bleu += bump;
        let before = aggregate_report(&records, TokenizationPolicy::default()).unwrap();
        let after = aggregate_report(&raised, TokenizationPolicy::default()).unwrap();
        let cat = &records[i].category;
        prop_assert!(after.per_category[cat].means.bleu > before.per_category[cat].means.bleu);
        prop_assert!(after.overall.bleu > before.overall.bleu);
    }

    #[test]
    fn overall_is_mean_of_category_means(
        values in prop::collection::vec((0usize..4, 0.0f64..=1.0), 1..30),
    ) {
        let cats = ["a", "b", "c", "d"];
        let records: Vec<MetricRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &(c, v))| record(i, cats[c], v))
            .collect();
        let report = aggregate_report(&records, TokenizationPolicy::default()).unwrap();
        let means: Vec<f64> = report.per_category.values().map(|s| s.means.bleu).collect();
        let expected = means.iter().sum::<f64>() / means.len() as f64;
        prop_assert!((report.overall.bleu - expected).abs() < 1e-9);

        let mut reversed = records.clone();
        reversed.reverse();
        let again = aggregate_report(&reversed, TokenizationPolicy::default()).unwrap();
        prop_assert_eq!(again, report);
    }
}

#[test]
fn single_record_report_equals_record() {
    let r = MetricRecord {
        sample_id: "only".into(),
        category: "forms".into(),
        bleu: 0.25,
        rouge_l: 0.5,
        lev_norm: 0.75,
    };
    let report = aggregate_report(&[r], TokenizationPolicy::default()).unwrap();
    assert_eq!(report.per_category["forms"].count, 1);
    assert_eq!(report.overall.bleu, 0.25);
    assert_eq!(report.overall.rouge_l, 0.5);
    assert_eq!(report.overall.lev_norm, 0.75);
}

#[test]
fn out_of_range_record_is_rejected() {
    let mut r = record(0, "x", 0.5);
    r.rouge_l = 1.5;
    assert!(aggregate_report(&[r], TokenizationPolicy::default()).is_err());
    assert!(aggregate_report(&[], TokenizationPolicy::default()).is_err());
}
