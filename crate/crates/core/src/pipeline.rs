//! End-to-end experiment driver: the combined corpus, model artifacts, and
//! the evaluation and rank-sweep procedures shared by the command-line
//! frontend and the acceptance suite.

use crate::error::{Error, Result};
use crate::eval::{
    evaluate_query, mean_average_precision, ModelKind, PrCurve, QueryEval, SweepFailure,
    SweepResult,
};
use crate::ingest::{
    build_count_matrix, build_vocabulary, Collection, QrelSet, RawDocument, RawQuery,
    TermDocumentMatrix, Vocabulary, Weighting,
};
use crate::linalg::{svd_truncated_with, SvdOptions};
use crate::lsa::{build_lsa_index_with, rank_lsa, LatentSpace, LsaIndex};
use crate::mrf::{parameters_from_factors, rank_mrf, LearningInput, MrfParameters};
use crate::ranking::RankedList;
use crate::snapshot::{
    decode_csc, decode_factors, encode_csc, encode_factors, Container, Decoder, Encoder,
};
use crate::vsm::{idf_table, rank_vsm, tfidf_weight, QueryVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map a closure over items, in parallel when the feature is enabled.
/// Output order always matches input order.
fn map_collect<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Parsed inputs of one collection before corpus assembly.
#[derive(Debug, Clone)]
pub struct CollectionSource {
    pub collection: Collection,
    pub docs: Vec<RawDocument>,
    pub queries: Vec<RawQuery>,
    pub qrels: QrelSet,
}

/// One collection inside the combined corpus.
#[derive(Debug, Clone)]
pub struct CollectionData {
    pub collection: Collection,
    /// Local document ids in matrix-column order.
    pub doc_ids: Vec<u32>,
    /// Queries sorted by ascending id.
    pub queries: Vec<RawQuery>,
    /// Judgments in local document ids.
    pub qrels: QrelSet,
}

/// The combined corpus: every collection indexed into one matrix. Global
/// document indices are matrix columns; collections occupy contiguous
/// column ranges in order.
#[derive(Debug, Clone)]
pub struct Corpus {
    collections: Vec<CollectionData>,
    offsets: Vec<u32>,
    vocab: Vocabulary,
    counts: TermDocumentMatrix,
    global_qrels: Vec<QrelSet>,
}

impl Corpus {
    pub fn build(
        sources: Vec<CollectionSource>,
        min_token_len: usize,
        max_df_frac: f64,
    ) -> Result<Corpus> {
        if sources.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut all_docs: Vec<RawDocument> = Vec::new();
        let mut collections = Vec::with_capacity(sources.len());
        for source in sources {
            let doc_ids: Vec<u32> = source.docs.iter().map(|d| d.id).collect();
            let query_ids: BTreeSet<u32> = source.queries.iter().map(|q| q.id).collect();
            source
                .qrels
                .validate(&query_ids, &doc_ids.iter().copied().collect())?;
            let mut queries = source.queries;
            queries.sort_by_key(|q| q.id);
            all_docs.extend(source.docs);
            collections.push(CollectionData {
                collection: source.collection,
                doc_ids,
                queries,
                qrels: source.qrels,
            });
        }
        let vocab = build_vocabulary(&all_docs, min_token_len, max_df_frac)?;
        let counts = build_count_matrix(&all_docs, &vocab);
        Ok(Self::assemble(collections, vocab, counts))
    }

    fn assemble(
        collections: Vec<CollectionData>,
        vocab: Vocabulary,
        counts: TermDocumentMatrix,
    ) -> Corpus {
        let mut offsets = Vec::with_capacity(collections.len());
        let mut offset = 0u32;
        for data in &collections {
            offsets.push(offset);
            offset += data.doc_ids.len() as u32;
        }
        let global_qrels = collections
            .iter()
            .zip(&offsets)
            .map(|(data, &off)| {
                let mut translated = QrelSet::new();
                let position: std::collections::HashMap<u32, u32> = data
                    .doc_ids
                    .iter()
                    .enumerate()
                    .map(|(pos, &id)| (id, off + pos as u32))
                    .collect();
                for (q, d) in data.qrels.iter() {
                    translated.insert(q, position[&d]);
                }
                translated
            })
            .collect();
        Corpus {
            collections,
            offsets,
            vocab,
            counts,
            global_qrels,
        }
    }

    pub fn collections(&self) -> &[CollectionData] {
        &self.collections
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn counts(&self) -> &TermDocumentMatrix {
        &self.counts
    }

    pub fn n_docs(&self) -> usize {
        self.counts.n_docs()
    }

    pub fn n_terms(&self) -> usize {
        self.counts.n_terms()
    }

    /// Judgments of collection `index`, translated to global doc indices.
    pub fn global_qrels(&self, index: usize) -> &QrelSet {
        &self.global_qrels[index]
    }

    /// Human-readable label `collection:local_id` for a global index.
    pub fn doc_label(&self, global: u32) -> String {
        for (i, data) in self.collections.iter().enumerate() {
            let start = self.offsets[i];
            let end = start + data.doc_ids.len() as u32;
            if global >= start && global < end {
                return format!(
                    "{}:{}",
                    data.collection.name(),
                    data.doc_ids[(global - start) as usize]
                );
            }
        }
        format!("?:{global}")
    }

    /// Find a query by collection and id.
    pub fn find_query(&self, collection: &Collection, query_id: u32) -> Option<&RawQuery> {
        self.collections
            .iter()
            .find(|c| &c.collection == collection)?
            .queries
            .iter()
            .find(|q| q.id == query_id)
    }

    /// Natural-log idf table over the combined corpus.
    pub fn idf(&self) -> Result<Vec<f64>> {
        let df: Vec<usize> = self.vocab.df().iter().map(|&d| d as usize).collect();
        idf_table(&df, self.n_docs())
    }

    pub fn report(&self) -> IngestReport {
        IngestReport {
            collections: self
                .collections
                .iter()
                .map(|c| CollectionCounts {
                    collection: c.collection.name().to_string(),
                    docs: c.doc_ids.len(),
                    queries: c.queries.len(),
                    judgments: c.qrels.len(),
                })
                .collect(),
            total_docs: self.n_docs(),
            total_queries: self.collections.iter().map(|c| c.queries.len()).sum(),
            vocabulary_size: self.vocab.len(),
            matrix_nonzeros: self.counts.matrix().nnz(),
            vocabulary_fingerprint: format!("{:016x}", self.vocab.fingerprint()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_container().save(path)
    }

    pub fn load(path: &Path) -> Result<Corpus> {
        Self::from_container(&Container::load(path)?)
    }

    pub fn to_container(&self) -> Container {
        let mut container = Container::new();
        let meta = CorpusMeta {
            version: 1,
            min_token_len: self.vocab.min_token_len(),
            max_df_frac: self.vocab.max_df_frac(),
            vocabulary_fingerprint: self.vocab.fingerprint(),
        };
        container.add(
            "meta",
            serde_json::to_vec(&meta).expect("meta serializes"),
        );

        let mut enc = Encoder::new();
        enc.u32(self.vocab.len() as u32);
        for term in self.vocab.terms() {
            enc.str(term);
        }
        enc.u32_slice(self.vocab.df());
        container.add("vocab", enc.finish());

        let mut enc = Encoder::new();
        enc.u32(self.collections.len() as u32);
        for data in &self.collections {
            enc.str(data.collection.name());
            enc.u32_slice(&data.doc_ids);
            enc.u32(data.queries.len() as u32);
            for query in &data.queries {
                enc.u32(query.id);
                enc.str(&query.text);
            }
            enc.u64(data.qrels.len() as u64);
            for (q, d) in data.qrels.iter() {
                enc.u32(q);
                enc.u32(d);
            }
        }
        container.add("collections", enc.finish());

        let mut enc = Encoder::new();
        enc.u8(match self.counts.weighting() {
            Weighting::RawCount => 0,
            Weighting::TfIdf => 1,
        });
        encode_csc(&mut enc, self.counts.matrix());
        container.add("counts", enc.finish());
        container
    }

    pub fn from_container(container: &Container) -> Result<Corpus> {
        let meta: CorpusMeta = serde_json::from_slice(container.get("meta")?)
            .map_err(|e| Error::Snapshot(format!("bad corpus meta: {e}")))?;
        if meta.version != 1 {
            return Err(Error::Snapshot(format!(
                "unsupported corpus snapshot version {}",
                meta.version
            )));
        }

        let payload = container.get("vocab")?;
        let mut dec = Decoder::new(payload);
        let n_terms = dec.u32()? as usize;
        let mut terms = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            terms.push(dec.str()?);
        }
        let df = dec.u32_slice()?;
        if df.len() != n_terms {
            return Err(Error::Snapshot("df length mismatch".into()));
        }
        let vocab = Vocabulary::from_parts(terms, df, meta.min_token_len, meta.max_df_frac);
        if vocab.fingerprint() != meta.vocabulary_fingerprint {
            return Err(Error::Snapshot(
                "vocabulary does not match its recorded fingerprint".into(),
            ));
        }

        let payload = container.get("collections")?;
        let mut dec = Decoder::new(payload);
        let n_coll = dec.u32()? as usize;
        let mut collections = Vec::with_capacity(n_coll);
        for _ in 0..n_coll {
            let name = dec.str()?;
            let collection = Collection::from_name(&name);
            let doc_ids = dec.u32_slice()?;
            let n_queries = dec.u32()? as usize;
            let mut queries = Vec::with_capacity(n_queries);
            for _ in 0..n_queries {
                let id = dec.u32()?;
                let text = dec.str()?;
                queries.push(RawQuery {
                    id,
                    collection: collection.clone(),
                    text,
                });
            }
            let n_qrels = dec.u64()? as usize;
            let mut qrels = QrelSet::new();
            for _ in 0..n_qrels {
                let q = dec.u32()?;
                let d = dec.u32()?;
                qrels.insert(q, d);
            }
            collections.push(CollectionData {
                collection,
                doc_ids,
                queries,
                qrels,
            });
        }

        let payload = container.get("counts")?;
        let mut dec = Decoder::new(payload);
        let weighting = match dec.u8()? {
            0 => Weighting::RawCount,
            1 => Weighting::TfIdf,
            other => {
                return Err(Error::Snapshot(format!("unknown weighting tag {other}")));
            }
        };
        let matrix = decode_csc(&mut dec)?;
        let counts = TermDocumentMatrix::new(matrix, weighting)?;
        if counts.n_terms() != vocab.len() {
            return Err(Error::Snapshot(
                "matrix row count does not match vocabulary".into(),
            ));
        }
        Ok(Self::assemble(collections, vocab, counts))
    }
}

#[derive(Serialize, Deserialize)]
struct CorpusMeta {
    version: u32,
    min_token_len: usize,
    max_df_frac: f64,
    vocabulary_fingerprint: u64,
}

/// Ingest summary emitted after building a corpus snapshot.
#[derive(Debug, Clone, Serialize)]
pub struct IngestReport {
    pub collections: Vec<CollectionCounts>,
    pub total_docs: usize,
    pub total_queries: usize,
    pub vocabulary_size: usize,
    pub matrix_nonzeros: usize,
    pub vocabulary_fingerprint: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollectionCounts {
    pub collection: String,
    pub docs: usize,
    pub queries: usize,
    pub judgments: usize,
}

/// Identification header stored with every model artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub model: ModelKind,
    /// Requested rank; zero for the plain vector-space model.
    pub k: usize,
    pub weighting: Weighting,
    pub vocabulary_fingerprint: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lsa_space: Option<LatentSpace>,
}

/// The rankable payload of a model artifact.
#[derive(Debug, Clone)]
pub enum ModelData {
    Vsm { matrix: TermDocumentMatrix },
    Lsa { index: LsaIndex, space: LatentSpace },
    Mrf { params: MrfParameters },
}

/// Result of ranking one query.
#[derive(Debug, Clone)]
pub struct RankOutcome {
    pub ranked: RankedList,
    /// True when no query term mapped into the vocabulary; scores are then
    /// uniform and the ordering falls back to document id.
    pub out_of_vocabulary: bool,
}

impl ModelData {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelData::Vsm { .. } => ModelKind::Vsm,
            ModelData::Lsa { .. } => ModelKind::Lsa,
            ModelData::Mrf { .. } => ModelKind::Mrf,
        }
    }

    /// Rank the whole corpus for a query text.
    pub fn rank(&self, corpus: &Corpus, query_text: &str) -> Result<RankOutcome> {
        let vocab = corpus.vocabulary();
        match self {
            ModelData::Vsm { matrix } => {
                let q = match matrix.weighting() {
                    Weighting::TfIdf => QueryVector::tfidf(vocab, query_text, &corpus.idf()?),
                    Weighting::RawCount => QueryVector::counts(vocab, query_text),
                };
                let out_of_vocabulary = q.is_zero();
                Ok(RankOutcome {
                    ranked: rank_vsm(&q, matrix),
                    out_of_vocabulary,
                })
            }
            ModelData::Lsa { index, space } => {
                let q = QueryVector::tfidf(vocab, query_text, &corpus.idf()?);
                let out_of_vocabulary = q.is_zero();
                Ok(RankOutcome {
                    ranked: rank_lsa(&q, index, *space),
                    out_of_vocabulary,
                })
            }
            ModelData::Mrf { params } => {
                let on = vocab.term_indicators(query_text);
                let out_of_vocabulary = !on.iter().any(|&b| b);
                Ok(RankOutcome {
                    ranked: rank_mrf(&on, params),
                    out_of_vocabulary,
                })
            }
        }
    }
}

/// A persisted ranking model plus its provenance.
#[derive(Debug, Clone)]
pub struct ModelArtifact {
    pub provenance: Provenance,
    pub data: ModelData,
}

/// Everything `build_model` needs beyond the corpus.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub k: usize,
    pub weighting: Weighting,
    pub lsa_space: LatentSpace,
    pub seed: u64,
}

impl ModelConfig {
    pub fn svd_options(&self) -> SvdOptions {
        SvdOptions {
            seed: self.seed,
            ..SvdOptions::default()
        }
    }
}

/// Build a model over the corpus.
pub fn build_model(corpus: &Corpus, config: &ModelConfig) -> Result<ModelArtifact> {
    let opts = config.svd_options();
    let data = match config.model {
        ModelKind::Vsm => {
            let matrix = match config.weighting {
                Weighting::TfIdf => tfidf_weight(corpus.counts())?,
                Weighting::RawCount => corpus.counts().clone(),
            };
            ModelData::Vsm { matrix }
        }
        ModelKind::Lsa => {
            if config.k < 1 {
                return Err(Error::InvalidArgument(
                    "latent models need a rank of at least 1".into(),
                ));
            }
            if config.weighting != Weighting::TfIdf {
                return Err(Error::InvalidArgument(
                    "the latent-space model is defined over tf-idf weights".into(),
                ));
            }
            let weighted = tfidf_weight(corpus.counts())?;
            let index = build_lsa_index_with(&weighted, config.k, &opts)?;
            ModelData::Lsa {
                index,
                space: config.lsa_space,
            }
        }
        ModelKind::Mrf => {
            if config.k < 1 {
                return Err(Error::InvalidArgument(
                    "latent models need a rank of at least 1".into(),
                ));
            }
            let observed = match config.weighting {
                Weighting::TfIdf => tfidf_weight(corpus.counts())?,
                Weighting::RawCount => corpus.counts().clone(),
            };
            let input = LearningInput::from_matrix(&observed);
            let params = crate::mrf::learn_parameters_with(&input, config.k, &opts)?;
            ModelData::Mrf { params }
        }
    };
    Ok(ModelArtifact {
        provenance: Provenance {
            model: config.model,
            k: if config.model == ModelKind::Vsm {
                0
            } else {
                config.k
            },
            weighting: config.weighting,
            vocabulary_fingerprint: corpus.vocabulary().fingerprint(),
            seed: config.seed,
            lsa_space: (config.model == ModelKind::Lsa).then_some(config.lsa_space),
        },
        data,
    })
}

impl ModelArtifact {
    /// Refuse to use an artifact against a corpus it was not built from.
    pub fn check_compatible(&self, corpus: &Corpus) -> Result<()> {
        let fp = corpus.vocabulary().fingerprint();
        if self.provenance.vocabulary_fingerprint != fp {
            return Err(Error::Incompatible(format!(
                "artifact vocabulary fingerprint {:016x} differs from corpus {:016x}; rebuild the index",
                self.provenance.vocabulary_fingerprint, fp
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut container = Container::new();
        container.add(
            "meta",
            serde_json::to_vec(&self.provenance).expect("provenance serializes"),
        );
        match &self.data {
            ModelData::Vsm { matrix } => {
                let mut enc = Encoder::new();
                enc.u8(match matrix.weighting() {
                    Weighting::RawCount => 0,
                    Weighting::TfIdf => 1,
                });
                encode_csc(&mut enc, matrix.matrix());
                container.add("vsm", enc.finish());
            }
            ModelData::Lsa { index, .. } => {
                let mut enc = Encoder::new();
                encode_factors(&mut enc, index.factors());
                container.add("lsa", enc.finish());
            }
            ModelData::Mrf { params } => {
                let mut enc = Encoder::new();
                encode_mrf(&mut enc, params)?;
                container.add("mrf", enc.finish());
            }
        }
        container.save(path)
    }

    pub fn load(path: &Path) -> Result<ModelArtifact> {
        let container = Container::load(path)?;
        let provenance: Provenance = serde_json::from_slice(container.get("meta")?)
            .map_err(|e| Error::Snapshot(format!("bad artifact meta: {e}")))?;
        let data = match provenance.model {
            ModelKind::Vsm => {
                let mut dec = Decoder::new(container.get("vsm")?);
                let weighting = match dec.u8()? {
                    0 => Weighting::RawCount,
                    1 => Weighting::TfIdf,
                    other => {
                        return Err(Error::Snapshot(format!("unknown weighting tag {other}")))
                    }
                };
                let matrix = TermDocumentMatrix::new(decode_csc(&mut dec)?, weighting)?;
                ModelData::Vsm { matrix }
            }
            ModelKind::Lsa => {
                let mut dec = Decoder::new(container.get("lsa")?);
                let factors = decode_factors(&mut dec)?;
                ModelData::Lsa {
                    index: LsaIndex::from_factors(factors),
                    space: provenance.lsa_space.unwrap_or_default(),
                }
            }
            ModelKind::Mrf => {
                let mut dec = Decoder::new(container.get("mrf")?);
                let params = decode_mrf(&mut dec)?;
                ModelData::Mrf { params }
            }
        };
        Ok(ModelArtifact { provenance, data })
    }
}

fn encode_mrf(enc: &mut Encoder, params: &MrfParameters) -> Result<()> {
    let crate::mrf::DocTermWeights::Factored { v, sigma, u_terms } = params.weights() else {
        return Err(Error::InvalidArgument(
            "only learned (factored) parameters are persisted".into(),
        ));
    };
    enc.f64_slice(params.doc_bias());
    enc.f64_slice(sigma);
    crate::snapshot::encode_dense(enc, u_terms);
    crate::snapshot::encode_dense(enc, v);
    Ok(())
}

fn decode_mrf(dec: &mut Decoder<'_>) -> Result<MrfParameters> {
    let doc_bias = dec.f64_slice()?;
    let sigma = dec.f64_slice()?;
    let u_terms = crate::snapshot::decode_dense(dec)?;
    let v = crate::snapshot::decode_dense(dec)?;
    if v.nrows() != doc_bias.len() || v.ncols() != sigma.len() || u_terms.ncols() != sigma.len() {
        return Err(Error::Snapshot("inconsistent parameter shapes".into()));
    }
    Ok(MrfParameters::from_factored(doc_bias, v, sigma, u_terms))
}

/// Per-collection evaluation of one model run.
#[derive(Debug, Clone)]
pub struct CollectionEvaluation {
    pub collection: Collection,
    /// (query id, average precision) in ascending query-id order.
    pub per_query_ap: Vec<(u32, f64)>,
    pub skipped_queries: usize,
    /// Mean average precision; absent when every query was skipped.
    pub map: Option<f64>,
    /// Pointwise mean interpolated curve over scored queries.
    pub mean_curve: Option<PrCurve>,
}

/// Evaluate a model against every collection's queries, ranking over the
/// combined corpus. Queries run in parallel; aggregation order is fixed by
/// ascending query id.
pub fn evaluate_model(corpus: &Corpus, data: &ModelData) -> Result<Vec<CollectionEvaluation>> {
    let mut out = Vec::with_capacity(corpus.collections().len());
    for (index, coll) in corpus.collections().iter().enumerate() {
        let qrels = corpus.global_qrels(index);
        let evals: Vec<Result<(u32, QueryEval)>> = map_collect(&coll.queries, |query| {
            let outcome = data.rank(corpus, &query.text)?;
            let mut ranked = outcome.ranked;
            ranked.query_id = query.id;
            Ok((query.id, evaluate_query(&ranked, qrels, query.id)))
        });
        let mut per_query_ap = Vec::new();
        let mut curves = Vec::new();
        let mut skipped = 0usize;
        for item in evals {
            let (query_id, eval) = item?;
            match eval {
                QueryEval::Scored { ap, curve } => {
                    per_query_ap.push((query_id, ap));
                    curves.push(curve);
                }
                QueryEval::Skipped => skipped += 1,
            }
        }
        let map = if per_query_ap.is_empty() {
            None
        } else {
            let aps: Vec<f64> = per_query_ap.iter().map(|&(_, ap)| ap).collect();
            Some(mean_average_precision(&aps)?)
        };
        out.push(CollectionEvaluation {
            collection: coll.collection.clone(),
            per_query_ap,
            skipped_queries: skipped,
            map,
            mean_curve: PrCurve::mean(&curves),
        });
    }
    Ok(out)
}

/// Compatibility-checked evaluation of a persisted artifact.
pub fn evaluate_artifact(
    corpus: &Corpus,
    artifact: &ModelArtifact,
) -> Result<Vec<CollectionEvaluation>> {
    artifact.check_compatible(corpus)?;
    evaluate_model(corpus, &artifact.data)
}

/// Mean average precision per rank over each collection, factoring the
/// matrix once at the largest rank and slicing the leading triplets for the
/// smaller ones.
pub fn sweep(
    corpus: &Corpus,
    model: ModelKind,
    k_values: &[usize],
    weighting: Weighting,
    space: LatentSpace,
    opts: &SvdOptions,
) -> Result<(Vec<SweepResult>, Vec<SweepFailure>)> {
    if model == ModelKind::Vsm {
        return Err(Error::InvalidArgument(
            "rank sweeps apply to the latent models only".into(),
        ));
    }
    let mut ks: Vec<usize> = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if ks.is_empty() || ks[0] < 1 {
        return Err(Error::InvalidArgument(
            "sweep needs at least one rank >= 1".into(),
        ));
    }
    let k_max = *ks.last().expect("nonempty");

    let mut failures: Vec<SweepFailure> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); corpus.collections().len()];

    let full = build_sweep_base(corpus, model, k_max, weighting, opts);
    match full {
        Err(err) => {
            for &k in &ks {
                failures.push(SweepFailure {
                    k,
                    message: err.to_string(),
                });
            }
        }
        Ok(base) => {
            for &k in &ks {
                let data = match base.at_rank(k, space) {
                    Ok(data) => data,
                    Err(err) => {
                        failures.push(SweepFailure {
                            k,
                            message: err.to_string(),
                        });
                        continue;
                    }
                };
                match evaluate_model(corpus, &data) {
                    Ok(evals) => {
                        for (i, eval) in evals.iter().enumerate() {
                            if let Some(map) = eval.map {
                                rows[i].push((k, map));
                            }
                        }
                    }
                    Err(err) => failures.push(SweepFailure {
                        k,
                        message: err.to_string(),
                    }),
                }
            }
        }
    }

    let results = corpus
        .collections()
        .iter()
        .zip(rows)
        .map(|(coll, rows)| SweepResult {
            model,
            collection: coll.collection.clone(),
            rows,
        })
        .collect();
    Ok((results, failures))
}

/// Factored matrix a sweep slices per rank.
enum SweepBase {
    Lsa(LsaIndex),
    Mrf {
        factors: crate::linalg::SvdFactors,
        n_terms: usize,
    },
}

impl SweepBase {
    fn at_rank(&self, k: usize, space: LatentSpace) -> Result<ModelData> {
        match self {
            SweepBase::Lsa(index) => Ok(ModelData::Lsa {
                index: index.truncated(k),
                space,
            }),
            SweepBase::Mrf { factors, n_terms } => {
                let params = parameters_from_factors(&factors.truncated(k), *n_terms)?;
                Ok(ModelData::Mrf { params })
            }
        }
    }
}

fn build_sweep_base(
    corpus: &Corpus,
    model: ModelKind,
    k_max: usize,
    weighting: Weighting,
    opts: &SvdOptions,
) -> Result<SweepBase> {
    match model {
        ModelKind::Lsa => {
            if weighting != Weighting::TfIdf {
                return Err(Error::InvalidArgument(
                    "the latent-space model is defined over tf-idf weights".into(),
                ));
            }
            let weighted = tfidf_weight(corpus.counts())?;
            Ok(SweepBase::Lsa(build_lsa_index_with(
                &weighted, k_max, opts,
            )?))
        }
        ModelKind::Mrf => {
            let observed = match weighting {
                Weighting::TfIdf => tfidf_weight(corpus.counts())?,
                Weighting::RawCount => corpus.counts().clone(),
            };
            let input = LearningInput::from_matrix(&observed);
            let factors = svd_truncated_with(input.matrix().into(), k_max, opts)?;
            Ok(SweepBase::Mrf {
                factors,
                n_terms: input.n_terms(),
            })
        }
        ModelKind::Vsm => unreachable!("rejected above"),
    }
}

/// Rank many queries with the per-query parallel path.
pub fn batch_rank(
    corpus: &Corpus,
    data: &ModelData,
    query_texts: &[String],
) -> Result<Vec<RankedList>> {
    let outcomes: Vec<Result<RankOutcome>> =
        map_collect(query_texts, |text| data.rank(corpus, text));
    outcomes
        .into_iter()
        .map(|o| o.map(|outcome| outcome.ranked))
        .collect()
}

/// Sequential reference for [`batch_rank`]; kept callable for the bench
/// suite.
pub fn batch_rank_seq(
    corpus: &Corpus,
    data: &ModelData,
    query_texts: &[String],
) -> Result<Vec<RankedList>> {
    query_texts
        .iter()
        .map(|text| data.rank(corpus, text).map(|o| o.ranked))
        .collect()
}

/// Build a learning input straight from a corpus (test and bench helper).
pub fn learning_input(corpus: &Corpus, weighting: Weighting) -> Result<LearningInput> {
    let observed = match weighting {
        Weighting::TfIdf => tfidf_weight(corpus.counts())?,
        Weighting::RawCount => corpus.counts().clone(),
    };
    Ok(LearningInput::from_matrix(&observed))
}
