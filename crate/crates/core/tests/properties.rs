//! Property tests over arbitrary inputs for the invariants that hold for
//! every string or score vector, not just curated cases.

use mrfir_core::ingest::{parse_qrels, parse_smart_docs, stem, tokenize, write_smart_docs, Collection};
use mrfir_core::linalg::cosine;
use mrfir_core::ranking::RankedList;
use proptest::prelude::*;

proptest! {
    /// Tokens are lowercase, purely alphabetic, and cover exactly the
    /// alphabetic runs of the input.
    #[test]
    fn tokens_are_lowercase_alpha(text in ".{0,200}") {
        for token in tokenize(&text) {
            prop_assert!(!token.is_empty());
            prop_assert!(token.bytes().all(|b| b.is_ascii_lowercase()));
        }
    }

    /// Tokenizing is insensitive to ASCII case.
    #[test]
    fn tokenize_case_insensitive(text in "[a-zA-Z ,.0-9-]{0,120}") {
        prop_assert_eq!(tokenize(&text), tokenize(&text.to_ascii_uppercase()));
    }

    /// Stems never grow and stay lowercase alphabetic.
    #[test]
    fn stem_shrinks(word in "[a-z]{1,20}") {
        let s = stem(&word);
        prop_assert!(s.len() <= word.len());
        prop_assert!(!s.is_empty());
        prop_assert!(s.bytes().all(|b| b.is_ascii_lowercase()));
    }

    /// Documents round-trip through the record writer.
    #[test]
    fn smart_round_trip(texts in prop::collection::vec("[a-zA-Z][a-zA-Z ,.]{0,60}", 1..8)) {
        let input: String = texts
            .iter()
            .enumerate()
            .map(|(i, t)| format!(".I {}\n.W\n{}\n", i + 1, t.trim()))
            .collect();
        if let Ok(docs) = parse_smart_docs(&input, &Collection::Cran) {
            let reparsed = parse_smart_docs(&write_smart_docs(&docs), &Collection::Cran).unwrap();
            prop_assert_eq!(docs, reparsed);
        }
    }

    /// Qrels parsing is binary and deduplicated regardless of input order
    /// or repetition.
    #[test]
    fn qrels_binary_dedup(pairs in prop::collection::vec((1u32..20, 1u32..50), 0..30)) {
        let mut doubled: Vec<(u32, u32)> = pairs.clone();
        doubled.extend(pairs.iter().copied());
        let text: String = doubled
            .iter()
            .map(|(q, d)| format!("{q} {d}\n"))
            .collect();
        let set = parse_qrels(&text).unwrap();
        let unique: std::collections::BTreeSet<(u32, u32)> = pairs.into_iter().collect();
        prop_assert_eq!(set.len(), unique.len());
        for (q, d) in unique {
            prop_assert!(set.contains(q, d));
        }
    }

    /// Ranked lists are strictly ordered by (score desc, id asc) and keep
    /// every document.
    #[test]
    fn ranking_order_invariant(scores in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let n = scores.len();
        let ranked = RankedList::from_scores(1, scores);
        prop_assert_eq!(ranked.len(), n);
        let mut seen = std::collections::BTreeSet::new();
        for pair in ranked.entries().windows(2) {
            prop_assert!(
                pair[0].score > pair[1].score
                    || (pair[0].score == pair[1].score && pair[0].doc < pair[1].doc)
            );
        }
        for entry in ranked.entries() {
            prop_assert!(seen.insert(entry.doc));
        }
    }

    /// Cosine symmetry and positive-scale invariance.
    #[test]
    fn cosine_symmetric_scale_invariant(
        a in prop::collection::vec(-10.0f64..10.0, 1..12),
        factor in 0.01f64..100.0,
    ) {
        let b: Vec<f64> = a.iter().rev().copied().collect();
        let ab = cosine(&a, &b);
        let ba = cosine(&b, &a);
        prop_assert!((ab - ba).abs() < 1e-12);
        let scaled: Vec<f64> = a.iter().map(|x| x * factor).collect();
        prop_assert!((cosine(&scaled, &b) - ab).abs() < 1e-9);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
    }
}
