//! Long-running smoke test at a few thousand documents: exercises the
//! sketched decomposition path, factored learning, and rank sweeps at a
//! scale where the dense path would be unreasonable.
//!
//! Run explicitly: `cargo test -p mrfir-core --test scale_smoke -- --ignored`

use mrfir_core::eval::ModelKind;
use mrfir_core::ingest::{Collection, QrelSet, RawDocument, RawQuery, Weighting};
use mrfir_core::linalg::SvdOptions;
use mrfir_core::lsa::LatentSpace;
use mrfir_core::pipeline::{sweep, CollectionSource, Corpus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Zipf-ish synthetic language: each of three topics prefers a different
/// band of the shared vocabulary.
fn synth_word(id: usize) -> String {
    let mut s = String::from("w");
    let mut v = id + 7;
    while v > 0 {
        s.push(char::from(b'a' + (v % 26) as u8));
        v /= 26;
    }
    s
}

fn synth_collection(name: &str, n_docs: usize, topic: usize, seed: u64) -> CollectionSource {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab_size = 2500usize;
    let collection = Collection::from_name(name);
    let mut docs = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let mut words = Vec::with_capacity(60);
        for _ in 0..60 {
            // topic band with a heavy shared head
            let word = if rng.random_bool(0.35) {
                rng.random_range(0..200)
            } else {
                let band = vocab_size / 3;
                topic * band + (rng.random_range(0.0f64..1.0).powi(2) * band as f64) as usize
            };
            words.push(synth_word(word));
        }
        docs.push(RawDocument {
            id: d as u32 + 1,
            collection: collection.clone(),
            text: words.join(" "),
        });
    }
    // each query quotes a document's opening words; that document is the
    // single relevant answer
    let mut queries = Vec::new();
    let mut qrels = QrelSet::new();
    for q in 0..12 {
        let doc = &docs[q * (n_docs / 12)];
        let text = doc
            .text
            .split_whitespace()
            .take(10)
            .collect::<Vec<_>>()
            .join(" ");
        queries.push(RawQuery {
            id: q as u32 + 1,
            collection: collection.clone(),
            text,
        });
        qrels.insert(q as u32 + 1, doc.id);
    }
    CollectionSource {
        collection,
        docs,
        queries,
        qrels,
    }
}

/// Dress rehearsal at the full experimental dimensions (about 5900 terms by
/// 7100 documents, ranks up to 1200). Validates memory headroom and the
/// wall-clock budget of the big sweeps without the real collections.
#[test]
#[ignore = "runs for several minutes at full experimental scale"]
fn sketched_sweep_at_full_dimensions() {
    let start = Instant::now();
    let sources = vec![
        synth_full_collection("cranlike", 3204, 0, 101),
        synth_full_collection("cacmlike", 1460, 1, 202),
        synth_full_collection("cisilike", 1460, 2, 303),
        synth_full_collection("medlike", 1033, 3, 404),
    ];
    let corpus = Corpus::build(sources, 3, 0.95).unwrap();
    println!(
        "built corpus: {} docs, {} terms, {} nonzeros in {:?}",
        corpus.n_docs(),
        corpus.n_terms(),
        corpus.counts().matrix().nnz(),
        start.elapsed()
    );

    let ks = [200usize, 700, 1200];
    let opts = SvdOptions::default();
    for model in [ModelKind::Lsa, ModelKind::Mrf] {
        let t = Instant::now();
        let (results, failures) = sweep(
            &corpus,
            model,
            &ks,
            Weighting::TfIdf,
            LatentSpace::RightVectors,
            &opts,
        )
        .unwrap();
        assert!(failures.is_empty(), "{failures:?}");
        println!("{} sweep over {:?} took {:?}", model.name(), ks, t.elapsed());
        for result in &results {
            assert_eq!(result.rows.len(), ks.len());
            println!(
                "  {}: {:?}",
                result.collection.name(),
                result
                    .rows
                    .iter()
                    .map(|&(k, m)| (k, (m * 1e4).round() / 1e4))
                    .collect::<Vec<_>>()
            );
        }
    }
    println!("total {:?}", start.elapsed());
}

/// Like `synth_collection` but sized and worded to reach a vocabulary in
/// the thousands.
fn synth_full_collection(
    name: &str,
    n_docs: usize,
    topic: usize,
    seed: u64,
) -> CollectionSource {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab_size = 7000usize;
    let collection = Collection::from_name(name);
    let mut docs = Vec::with_capacity(n_docs);
    for d in 0..n_docs {
        let mut words = Vec::with_capacity(70);
        for _ in 0..70 {
            let word = if rng.random_bool(0.3) {
                rng.random_range(0..300)
            } else {
                let band = vocab_size / 4;
                topic * band + (rng.random_range(0.0f64..1.0).powi(2) * band as f64) as usize
            };
            words.push(synth_word(word));
        }
        docs.push(RawDocument {
            id: d as u32 + 1,
            collection: collection.clone(),
            text: words.join(" "),
        });
    }
    let mut queries = Vec::new();
    let mut qrels = QrelSet::new();
    let n_queries = 90.min(n_docs / 4);
    for q in 0..n_queries {
        let doc = &docs[q * (n_docs / n_queries)];
        let text = doc
            .text
            .split_whitespace()
            .take(12)
            .collect::<Vec<_>>()
            .join(" ");
        queries.push(RawQuery {
            id: q as u32 + 1,
            collection: collection.clone(),
            text,
        });
        qrels.insert(q as u32 + 1, doc.id);
    }
    CollectionSource {
        collection,
        docs,
        queries,
        qrels,
    }
}

#[test]
#[ignore = "several-minute corpus-scale run"]
fn sketched_sweep_at_scale() {
    let start = Instant::now();
    let sources = vec![
        synth_collection("alpha", 1100, 0, 11),
        synth_collection("beta", 1000, 1, 22),
        synth_collection("gamma", 900, 2, 33),
    ];
    let corpus = Corpus::build(sources, 3, 0.95).unwrap();
    println!(
        "built corpus: {} docs, {} terms, {} nonzeros in {:?}",
        corpus.n_docs(),
        corpus.n_terms(),
        corpus.counts().matrix().nnz(),
        start.elapsed()
    );
    assert!(corpus.n_terms() > 1000, "synthetic vocabulary too small");

    let ks = [50usize, 150, 300];
    let opts = SvdOptions::default();
    for model in [ModelKind::Lsa, ModelKind::Mrf] {
        let t = Instant::now();
        let (results, failures) = sweep(
            &corpus,
            model,
            &ks,
            Weighting::TfIdf,
            LatentSpace::RightVectors,
            &opts,
        )
        .unwrap();
        assert!(failures.is_empty(), "{failures:?}");
        for result in &results {
            assert_eq!(result.rows.len(), ks.len());
            for &(k, map) in &result.rows {
                assert!((0.0..=1.0).contains(&map), "k={k} map={map}");
            }
            println!(
                "{} {}: {:?} in {:?}",
                result.model.name(),
                result.collection.name(),
                result.rows,
                t.elapsed()
            );
        }
        // self-retrieval queries give the latent models real signal: demand
        // a sane mean average precision at the largest rank
        let best = results
            .iter()
            .filter_map(|r| r.rows.last().map(|&(_, m)| m))
            .fold(0.0f64, f64::max);
        assert!(best > 0.3, "{model:?} best map {best} suspiciously low");
    }
    println!("total {:?}", start.elapsed());
}
