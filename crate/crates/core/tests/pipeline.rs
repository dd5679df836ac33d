//! End-to-end pipeline tests over the bundled miniature corpus: ingest,
//! snapshot round trips, model builds, evaluation, and sweeps.

use mrfir_core::eval::ModelKind;
use mrfir_core::ingest::{
    parse_qrels, parse_smart_docs, parse_smart_queries, Collection, Weighting,
};
use mrfir_core::lsa::LatentSpace;
use mrfir_core::pipeline::{
    build_model, evaluate_artifact, evaluate_model, sweep, CollectionSource, Corpus, ModelArtifact,
    ModelConfig,
};
use mrfir_core::linalg::SvdOptions;
use std::fs;
use std::path::{Path, PathBuf};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn load_collection(root: &Path, name: &str) -> CollectionSource {
    let collection = Collection::from_name(name);
    let dir = root.join(name);
    let docs = parse_smart_docs(&fs::read_to_string(dir.join("docs.txt")).unwrap(), &collection)
        .unwrap();
    let queries = parse_smart_queries(
        &fs::read_to_string(dir.join("queries.txt")).unwrap(),
        &collection,
    )
    .unwrap();
    let qrels = parse_qrels(&fs::read_to_string(dir.join("qrels.txt")).unwrap()).unwrap();
    CollectionSource {
        collection,
        docs,
        queries,
        qrels,
    }
}

fn mini_corpus() -> Corpus {
    let root = fixture_dir().join("mini");
    let sources = vec![
        load_collection(&root, "aero"),
        load_collection(&root, "lib"),
        load_collection(&root, "med"),
    ];
    Corpus::build(sources, 3, 0.95).unwrap()
}

fn config(model: ModelKind, k: usize) -> ModelConfig {
    ModelConfig {
        model,
        k,
        weighting: Weighting::TfIdf,
        lsa_space: LatentSpace::RightVectors,
        seed: 42,
    }
}

#[test]
fn ingest_report_counts_collections() {
    let corpus = mini_corpus();
    let report = corpus.report();
    assert_eq!(report.collections.len(), 3);
    assert_eq!(report.total_docs, 20);
    assert_eq!(report.total_queries, 8);
    let aero = &report.collections[0];
    assert_eq!(aero.collection, "aero");
    assert_eq!(aero.docs, 8);
    assert_eq!(aero.queries, 3);
    // graded judgment with code -1 was binarized away
    assert_eq!(aero.judgments, 6);
    assert!(report.vocabulary_size > 50);
}

#[test]
fn corpus_snapshot_bytes_are_deterministic() {
    let corpus = mini_corpus();
    let once = corpus.to_container().to_bytes();
    let again = mini_corpus().to_container().to_bytes();
    assert_eq!(once, again);
}

#[test]
fn corpus_snapshot_round_trip() {
    let corpus = mini_corpus();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.snap");
    corpus.save(&path).unwrap();
    let loaded = Corpus::load(&path).unwrap();
    assert_eq!(loaded.vocabulary(), corpus.vocabulary());
    assert_eq!(loaded.counts(), corpus.counts());
    assert_eq!(loaded.collections().len(), corpus.collections().len());
    for (a, b) in loaded.collections().iter().zip(corpus.collections()) {
        assert_eq!(a.collection, b.collection);
        assert_eq!(a.doc_ids, b.doc_ids);
        assert_eq!(a.queries, b.queries);
        assert_eq!(a.qrels, b.qrels);
    }
    // saving the loaded corpus reproduces the file byte for byte
    let reencoded = loaded.to_container().to_bytes();
    assert_eq!(reencoded, fs::read(&path).unwrap());
}

#[test]
fn vsm_self_query_retrieves_source_document() {
    let corpus = mini_corpus();
    let artifact = build_model(&corpus, &config(ModelKind::Vsm, 0)).unwrap();
    // query lifted from aero doc 4 (global index 3)
    let outcome = artifact
        .data
        .rank(
            &corpus,
            "panel flutter at supersonic speeds for aeroelastic models of heated aircraft",
        )
        .unwrap();
    assert!(!outcome.out_of_vocabulary);
    assert_eq!(outcome.ranked.entries()[0].doc, 3);
}

#[test]
fn out_of_vocabulary_query_is_flagged_and_uniform() {
    let corpus = mini_corpus();
    let artifact = build_model(&corpus, &config(ModelKind::Vsm, 0)).unwrap();
    let outcome = artifact.data.rank(&corpus, "zzz qqq xyzzy").unwrap();
    assert!(outcome.out_of_vocabulary);
    let order = outcome.ranked.doc_order();
    let expected: Vec<u32> = (0..corpus.n_docs() as u32).collect();
    assert_eq!(order, expected);
}

#[test]
fn evaluation_brackets_and_skip_counting() {
    let corpus = mini_corpus();
    for kind in [ModelKind::Vsm, ModelKind::Lsa, ModelKind::Mrf] {
        let artifact = build_model(&corpus, &config(kind, 10)).unwrap();
        let evals = evaluate_artifact(&corpus, &artifact).unwrap();
        assert_eq!(evals.len(), 3);
        for eval in &evals {
            for &(_, ap) in &eval.per_query_ap {
                assert!((0.0..=1.0).contains(&ap), "{kind:?} ap {ap} out of range");
            }
            if let Some(map) = eval.map {
                assert!((0.0..=1.0).contains(&map));
            }
            if let Some(curve) = &eval.mean_curve {
                for w in curve.points().windows(2) {
                    assert!(w[1].1 <= w[0].1 + 1e-12, "curve not non-increasing");
                }
            }
        }
        // med query 3 has no judgments and must be skipped, not scored
        let med = evals
            .iter()
            .find(|e| e.collection == Collection::Med)
            .unwrap();
        assert_eq!(med.skipped_queries, 1);
        assert_eq!(med.per_query_ap.len(), 2);
    }
}

#[test]
fn matching_queries_score_well_with_vsm() {
    let corpus = mini_corpus();
    let artifact = build_model(&corpus, &config(ModelKind::Vsm, 0)).unwrap();
    let evals = evaluate_artifact(&corpus, &artifact).unwrap();
    // the med queries are verbatim fragments of their relevant documents
    let med = evals
        .iter()
        .find(|e| e.collection == Collection::Med)
        .unwrap();
    assert!(
        med.map.unwrap() > 0.5,
        "expected strong med map, got {:?}",
        med.map
    );
}

#[test]
fn artifact_round_trip_preserves_rankings() {
    let corpus = mini_corpus();
    let dir = tempfile::tempdir().unwrap();
    for kind in [ModelKind::Vsm, ModelKind::Lsa, ModelKind::Mrf] {
        let artifact = build_model(&corpus, &config(kind, 8)).unwrap();
        let path = dir.path().join(format!("{}.model", kind.name()));
        artifact.save(&path).unwrap();
        let loaded = ModelArtifact::load(&path).unwrap();
        assert_eq!(loaded.provenance, artifact.provenance);
        let text = "boundary layer flow over a wing";
        let a = artifact.data.rank(&corpus, text).unwrap().ranked;
        let b = loaded.data.rank(&corpus, text).unwrap().ranked;
        assert_eq!(a, b);
        // identical rebuild produces identical bytes
        let again = build_model(&corpus, &config(kind, 8)).unwrap();
        let path2 = dir.path().join(format!("{}-2.model", kind.name()));
        again.save(&path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }
}

#[test]
fn vocabulary_fingerprint_guards_artifacts() {
    let corpus = mini_corpus();
    let artifact = build_model(&corpus, &config(ModelKind::Lsa, 5)).unwrap();
    // same sources, different preprocessing: different vocabulary
    let root = fixture_dir().join("mini");
    let other = Corpus::build(
        vec![
            load_collection(&root, "aero"),
            load_collection(&root, "lib"),
            load_collection(&root, "med"),
        ],
        4,
        0.95,
    )
    .unwrap();
    let err = evaluate_artifact(&other, &artifact).unwrap_err();
    assert!(err.to_string().contains("fingerprint"));
}

#[test]
fn mrf_factored_rank_is_bounded() {
    let corpus = mini_corpus();
    let artifact = build_model(&corpus, &config(ModelKind::Mrf, 6)).unwrap();
    match &artifact.data {
        mrfir_core::pipeline::ModelData::Mrf { params } => {
            assert!(params.factored_rank().unwrap() <= 6);
            assert_eq!(params.n_docs(), corpus.n_docs());
            assert_eq!(params.n_terms(), corpus.n_terms());
        }
        other => panic!("unexpected artifact payload {other:?}"),
    }
}

#[test]
fn sweep_slices_match_direct_builds() {
    let corpus = mini_corpus();
    let ks = [2usize, 5, 9];
    let opts = SvdOptions {
        seed: 42,
        ..SvdOptions::default()
    };
    for model in [ModelKind::Lsa, ModelKind::Mrf] {
        let (results, failures) = sweep(
            &corpus,
            model,
            &ks,
            Weighting::TfIdf,
            LatentSpace::RightVectors,
            &opts,
        )
        .unwrap();
        assert!(failures.is_empty(), "unexpected failures: {failures:?}");
        assert_eq!(results.len(), 3);
        for result in &results {
            assert_eq!(result.model, model);
            let row_ks: Vec<usize> = result.rows.iter().map(|&(k, _)| k).collect();
            assert_eq!(row_ks, ks, "rows must cover every rank in order");
            for &(_, map) in &result.rows {
                assert!((0.0..=1.0).contains(&map));
            }
        }
        // sweep rows agree with building each rank from scratch
        for &k in &ks {
            let direct = build_model(
                &corpus,
                &ModelConfig {
                    model,
                    k,
                    weighting: Weighting::TfIdf,
                    lsa_space: LatentSpace::RightVectors,
                    seed: 42,
                },
            )
            .unwrap();
            let evals = evaluate_model(&corpus, &direct.data).unwrap();
            for (result, eval) in results.iter().zip(&evals) {
                let swept = result.rows.iter().find(|&&(rk, _)| rk == k).unwrap().1;
                let direct_map = eval.map.unwrap();
                assert!(
                    (swept - direct_map).abs() < 1e-9,
                    "{model:?} k={k}: sweep {swept} vs direct {direct_map}"
                );
            }
        }
    }
}

#[test]
fn single_rank_sweep_has_single_row() {
    let corpus = mini_corpus();
    let (results, failures) = sweep(
        &corpus,
        ModelKind::Lsa,
        &[4],
        Weighting::TfIdf,
        LatentSpace::RightVectors,
        &SvdOptions::default(),
    )
    .unwrap();
    assert!(failures.is_empty());
    for result in results {
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.rows[0].0, 4);
    }
}

#[test]
fn sweep_rejects_vsm() {
    let corpus = mini_corpus();
    assert!(sweep(
        &corpus,
        ModelKind::Vsm,
        &[1],
        Weighting::TfIdf,
        LatentSpace::RightVectors,
        &SvdOptions::default(),
    )
    .is_err());
}

#[test]
fn appendix_samples_parse_into_single_records() {
    let root = fixture_dir().join("appendix");
    let cran = parse_smart_docs(
        &fs::read_to_string(root.join("cran_docs.txt")).unwrap(),
        &Collection::Cran,
    )
    .unwrap();
    assert_eq!(cran.len(), 1);
    assert!(cran[0]
        .text
        .contains("aerodynamics of a wing in a slipstream"));
    // title duplicated into the body by the source is preserved verbatim
    assert!(cran[0].text.starts_with("experimental investigation"));

    let cisi = parse_smart_docs(
        &fs::read_to_string(root.join("cisi_docs.txt")).unwrap(),
        &Collection::Cisi,
    )
    .unwrap();
    assert!(cisi[0].text.contains("history of the DEWEY Decimal"));

    let cacm = parse_smart_docs(
        &fs::read_to_string(root.join("cacm_docs.txt")).unwrap(),
        &Collection::Cacm,
    )
    .unwrap();
    assert!(cacm[0].text.contains("misspelled"));
    // the .N and .B sections are dropped
    assert!(!cacm[0].text.contains("CA581203"));

    let med = parse_smart_docs(
        &fs::read_to_string(root.join("med_docs.txt")).unwrap(),
        &Collection::Med,
    )
    .unwrap();
    assert!(med[0].text.contains("maternal and fetal plasma"));

    let queries = parse_smart_queries(
        &fs::read_to_string(root.join("queries.txt")).unwrap(),
        &Collection::Other("mixed".into()),
    )
    .unwrap();
    assert_eq!(queries.len(), 8);
    assert!(queries[4].text.contains("TSS"));
}
