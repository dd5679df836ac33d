//! Parallel-vs-sequential comparison of the data-parallel kernels: sparse
//! and dense products plus batched query ranking. Build with default
//! features so the rayon paths are compiled; the `sequential` entries
//! measure the always-available sequential reference.

use criterion::{criterion_group, criterion_main, Criterion};
use mrfir_core::eval::ModelKind;
use mrfir_core::ingest::{Collection, QrelSet, RawDocument, RawQuery, Weighting};
use mrfir_core::linalg::{gemm, gemm_seq, CscMatrix};
use mrfir_core::lsa::LatentSpace;
use mrfir_core::pipeline::{
    batch_rank, batch_rank_seq, build_model, CollectionSource, Corpus, ModelConfig,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn random_sparse(nrows: usize, ncols: usize, per_row: usize, seed: u64) -> CscMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::with_capacity(nrows * per_row);
    for r in 0..nrows {
        for _ in 0..per_row {
            triplets.push((r, rng.random_range(0..ncols), rng.random_range(0.1..2.0)));
        }
    }
    CscMatrix::from_triplets(nrows, ncols, &triplets).unwrap()
}

fn random_dense(nrows: usize, ncols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(nrows, ncols, |_, _| rng.random_range(-1.0..1.0))
}

fn bench_spmm(c: &mut Criterion) {
    let a = random_sparse(4000, 3000, 12, 1);
    let b = random_dense(3000, 64, 2);
    let mut group = c.benchmark_group("spmm_4000x3000x64");
    group.sample_size(20);
    group.bench_function("parallel", |bench| {
        bench.iter(|| black_box(a.mul_dense(black_box(&b))))
    });
    group.bench_function("sequential", |bench| {
        bench.iter(|| black_box(a.mul_dense_seq(black_box(&b))))
    });
    group.finish();
}

fn bench_gemm(c: &mut Criterion) {
    let a = random_dense(384, 384, 3);
    let b = random_dense(384, 384, 4);
    let mut group = c.benchmark_group("gemm_384");
    group.sample_size(20);
    group.bench_function("parallel", |bench| {
        bench.iter(|| black_box(gemm(black_box(&a), black_box(&b))))
    });
    group.bench_function("sequential", |bench| {
        bench.iter(|| black_box(gemm_seq(black_box(&a), black_box(&b))))
    });
    group.finish();
}

fn synth_corpus() -> (Corpus, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let collection = Collection::from_name("bench");
    let word = |id: usize| {
        let mut s = String::from("w");
        let mut v = id + 7;
        while v > 0 {
            s.push(char::from(b'a' + (v % 26) as u8));
            v /= 26;
        }
        s
    };
    let docs: Vec<RawDocument> = (0..800)
        .map(|d| {
            let text = (0..50)
                .map(|_| word(rng.random_range(0..1200)))
                .collect::<Vec<_>>()
                .join(" ");
            RawDocument {
                id: d + 1,
                collection: collection.clone(),
                text,
            }
        })
        .collect();
    let queries: Vec<String> = (0..64)
        .map(|q| {
            docs[q * 12]
                .text
                .split_whitespace()
                .take(8)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    let source = CollectionSource {
        collection: collection.clone(),
        docs,
        queries: vec![RawQuery {
            id: 1,
            collection,
            text: "placeholder".into(),
        }],
        qrels: QrelSet::new(),
    };
    let corpus = Corpus::build(vec![source], 3, 0.95).unwrap();
    (corpus, queries)
}

fn bench_batch_rank(c: &mut Criterion) {
    let (corpus, queries) = synth_corpus();
    let artifact = build_model(
        &corpus,
        &ModelConfig {
            model: ModelKind::Mrf,
            k: 64,
            weighting: Weighting::TfIdf,
            lsa_space: LatentSpace::RightVectors,
            seed: 0,
        },
    )
    .unwrap();
    let mut group = c.benchmark_group("batch_rank_mrf_64q");
    group.sample_size(20);
    group.bench_function("parallel", |bench| {
        bench.iter(|| black_box(batch_rank(&corpus, &artifact.data, black_box(&queries))))
    });
    group.bench_function("sequential", |bench| {
        bench.iter(|| {
            black_box(batch_rank_seq(
                &corpus,
                &artifact.data,
                black_box(&queries),
            ))
        })
    });
    group.finish();
}

criterion_group!(benches, bench_spmm, bench_gemm, bench_batch_rank);
criterion_main!(benches);
